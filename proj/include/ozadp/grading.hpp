#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ozadp/adp.hpp"
#include "ozadp/matrix.hpp"

namespace ozadp {

// Adversarial exponent-span test pair. Row k of lhs is the cyclic shift by k
// of the vector x_i * 2^(j_i); column k of rhs is the matching shift of
// x_i * 2^(-j_i). The two-sided scaling cancels on the diagonal, so
// (lhs * rhs)_ii == x^T x exactly, while off-diagonal dot products mix
// exponents spanning roughly [-2b, 2b].
struct Test2Instance {
    std::size_t n = 0;
    int b = 0;         // exponent half-span parameter
    double delta = 0.0;
    std::uint64_t seed = 0;
    std::vector<double> x;  // entries in (1,2)
    std::vector<int> j;     // j[0] = -b, j[n-1] = +b
    MatrixF64 lhs;
    MatrixF64 rhs;
};

// Builds the instance above. All scalings are exact powers of two, so lhs and
// rhs hold scaled copies of x with no rounding. Throws when n < 2, b < 0, or
// b > 1022 (entries would leave the normal FP64 range).
Test2Instance gen_test2(std::size_t n, int b, std::uint64_t seed);

// Largest b such that the diagonal x^T x stays far below the FP64 overflow
// threshold: floor(log2 sqrt(max double)) - ceil(log2 n) - 1.
int default_test2_b(std::size_t n);

// Row-major uniform(lo, hi) fill from xoshiro256++; same seed gives a
// bitwise-identical matrix.
MatrixF64 gen_uniform_rect(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo = 0.0,
                           double hi = 1.0);
MatrixF64 gen_uniform(std::size_t n, std::uint64_t seed, double lo = 0.0, double hi = 1.0);

// Componentwise relative errors with the two-case reference: diagonal entries
// compare against exact_diag when given (the exact x^T x of the test pair,
// one value for the whole diagonal), everything else against c_ref. Entries
// whose reference is zero are skipped and counted. Optional elementwise
// output receives all per-entry errors (skipped entries report 0).
struct ErrorReport {
    double max_err = 0.0;
    double avg_err = 0.0;
    std::uint64_t counted = 0;
    std::uint64_t skipped = 0;
};
ErrorReport error_report(const MatrixF64& c, const MatrixF64& c_ref,
                         std::optional<double> exact_diag = std::nullopt,
                         std::vector<double>* elementwise = nullptr);

// One sweep size for the componentwise grading bound. Ratios are
// |C - AB| / (eps * (|A||B|)) with eps = 2^-52, max and mean over entries,
// for the dispatched run (emu_*) and the plain native run (nat_*).
struct GradePoint {
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double emu_max_ratio = 0.0;
    double emu_avg_ratio = 0.0;
    double nat_max_ratio = 0.0;
    double nat_avg_ratio = 0.0;
    int esc_bits = -1;  // -1 when the decision never computed an ESC
    int slices = 0;     // 0 on the fallback path
    bool fallback = false;
};

// Measures one size: uniform(0,1) operands, exact product as reference and as
// the |A||B| denominator (entries are positive), dispatched run under config,
// native run for the baseline ratios.
GradePoint grade_uniform_point(std::size_t n, std::uint64_t seed, const AdpConfig& config);

// Grade-A verdict over a size sweep. c is calibrated once against the native
// baseline (max over points of nat_max_ratio / n); every dispatched point
// must satisfy emu_max_ratio <= c * n, and the least-squares slope of
// log(emu_max_ratio) vs log(n) must stay at or below 1.15 (at most linear
// growth, with tolerance). Requires at least 4 sizes spanning at least 8x.
struct GradeReport {
    double c_calibrated = 0.0;
    double slope_max = 0.0;        // fitted growth exponent of emu_max_ratio
    double slope_avg = 0.0;        // fitted growth exponent of emu_avg_ratio
    double native_slope_avg = 0.0; // same fit for the native baseline
    bool eq1_pass = false;
    bool slope_pass = false;
    bool grade_a_pass = false;
};
GradeReport grade_a_check(const std::vector<GradePoint>& points);

// One CSV row of a sweep. Optional fields render as empty cells.
struct SweepRow {
    std::string test;
    std::size_t n = 0;
    std::optional<int> b;
    std::string mode;
    int target_bits = 53;
    std::optional<int> esc_bits;
    int slices = 0;
    bool fallback = false;
    double max_err = 0.0;
    double avg_err = 0.0;
    std::uint64_t seed = 0;
};
const char* csv_header();
std::string to_csv(const SweepRow& row);

// Exponent-span sweep at fixed n: one instance per b (same seed, so the same
// x throughout), native reference computed once per instance, one row per
// (b, mode). Modes are parsed with parse_mode ("auto", "native",
// "emulate:S"). max_err/avg_err hold the two-case relative errors.
std::vector<SweepRow> run_test2_sweep(std::size_t n, const std::vector<int>& b_list,
                                      const std::vector<std::string>& modes, std::uint64_t seed,
                                      const AdpConfig& base = AdpConfig{});

// Uniform(0,1) grading sweep over sizes. Each size gets a derived seed, one
// dispatched run under base, and one native baseline run; rows carry the
// grading ratios (not plain relative errors) so the verdict can be recomputed
// from the CSV alone.
struct UniformGradeResult {
    std::vector<GradePoint> points;
    std::vector<SweepRow> rows;
    GradeReport report;
};
UniformGradeResult run_uniform_grade(const std::vector<std::size_t>& n_list, std::uint64_t seed,
                                     const AdpConfig& base = AdpConfig{});

}  // namespace ozadp
