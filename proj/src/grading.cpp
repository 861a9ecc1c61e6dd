#include "ozadp/grading.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>

#include "ozadp/oracle.hpp"
#include "ozadp/rng.hpp"

namespace ozadp {

Test2Instance gen_test2(std::size_t n, int b, std::uint64_t seed) {
    require(n >= 2, "gen_test2: n must be at least 2");
    require(b >= 0, "gen_test2: b must be nonnegative");
    // Entries are x * 2^(+-j) with x in (1,2) and |j| <= b, so b <= 1022
    // keeps every entry normal and finite.
    require(b <= 1022, "gen_test2: b too large, entries would leave the FP64 range");

    Test2Instance inst;
    inst.n = n;
    inst.b = b;
    inst.seed = seed;
    inst.delta = (2.0 * b) / double(n - 1);

    Xoshiro256pp rng(seed);
    inst.x.resize(n);
    for (double& v : inst.x) v = 1.0 + rng.u01();

    inst.j.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        inst.j[i] = b == 0 ? 0 : int(-b + std::llround(double(i) * inst.delta));
    // The endpoint rounds exactly: (n-1)*delta = 2b up to a relative eps,
    // far inside the 0.5 rounding margin.
    require(inst.j.front() == -b && inst.j.back() == b, "gen_test2: endpoint rounding failed");

    inst.lhs = MatrixF64(n, n);
    inst.rhs = MatrixF64(n, n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t s = i >= k ? i - k : i + n - k;  // cyclic shift by k
            inst.lhs(k, i) = std::ldexp(inst.x[s], inst.j[s]);
            inst.rhs(i, k) = std::ldexp(inst.x[s], -inst.j[s]);
        }
    }
    return inst;
}

int default_test2_b(std::size_t n) {
    require(n >= 2, "default_test2_b: n must be at least 2");
    // floor(log2 sqrt(max double)) = floor(1023.9999../2) = 511.
    const int ceil_log2_n = std::bit_width(n - 1);
    return 511 - ceil_log2_n - 1;
}

MatrixF64 gen_uniform_rect(std::size_t rows, std::size_t cols, std::uint64_t seed, double lo,
                           double hi) {
    require(lo < hi, "gen_uniform_rect: empty interval");
    MatrixF64 m(rows, cols);
    Xoshiro256pp rng(seed);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = rng.uniform(lo, hi);
    return m;
}

MatrixF64 gen_uniform(std::size_t n, std::uint64_t seed, double lo, double hi) {
    return gen_uniform_rect(n, n, seed, lo, hi);
}

ErrorReport error_report(const MatrixF64& c, const MatrixF64& c_ref,
                         std::optional<double> exact_diag, std::vector<double>* elementwise) {
    require(c.rows() == c_ref.rows() && c.cols() == c_ref.cols(), "error_report: shape mismatch");
    ErrorReport rep;
    if (elementwise) elementwise->assign(c.size(), 0.0);
    long double sum = 0.0L;
    for (std::size_t i = 0; i < c.rows(); ++i) {
        for (std::size_t j = 0; j < c.cols(); ++j) {
            const double ref = i == j && exact_diag ? *exact_diag : c_ref(i, j);
            if (ref == 0.0) {
                ++rep.skipped;
                continue;
            }
            const double e = std::fabs(ref - c(i, j)) / std::fabs(ref);
            if (elementwise) (*elementwise)[i * c.cols() + j] = e;
            rep.max_err = std::max(rep.max_err, e);
            sum += e;
            ++rep.counted;
        }
    }
    rep.avg_err = rep.counted ? double(sum / (long double)(rep.counted)) : 0.0;
    return rep;
}

GradePoint grade_uniform_point(std::size_t n, std::uint64_t seed, const AdpConfig& config) {
    require(n >= 1, "grade_uniform_point: n must be positive");
    Xoshiro256pp root(seed);
    const std::uint64_t seed_a = root();
    const std::uint64_t seed_b = root();
    const MatrixF64 a = gen_uniform(n, seed_a);
    const MatrixF64 b = gen_uniform(n, seed_b);
    const MatrixF64 exact = exact_gemm(a, b);

    auto [emu, trace] = adp_gemm(a, b, 1.0, 0.0, nullptr, config);
    const MatrixF64 nat = native_gemm(a, b);

    GradePoint p;
    p.n = n;
    p.seed = seed;
    p.fallback = trace.decision.path == AdpPath::NativeFallback;
    p.slices = trace.decision.path == AdpPath::Emulated ? trace.decision.slices : 0;
    p.esc_bits = trace.decision.esc ? trace.decision.esc->esc_bits : -1;

    // Entries are positive, so (|A||B|)_ij is the exact product itself.
    const double eps = 0x1p-52;
    long double emu_sum = 0.0L, nat_sum = 0.0L;
    std::uint64_t counted = 0;
    for (std::size_t i = 0; i < exact.size(); ++i) {
        const double denom = eps * exact.data()[i];
        if (denom == 0.0) continue;
        const double ge = std::fabs(emu.data()[i] - exact.data()[i]) / denom;
        const double gn = std::fabs(nat.data()[i] - exact.data()[i]) / denom;
        p.emu_max_ratio = std::max(p.emu_max_ratio, ge);
        p.nat_max_ratio = std::max(p.nat_max_ratio, gn);
        emu_sum += ge;
        nat_sum += gn;
        ++counted;
    }
    if (counted) {
        p.emu_avg_ratio = double(emu_sum / (long double)(counted));
        p.nat_avg_ratio = double(nat_sum / (long double)(counted));
    }
    return p;
}

namespace {

// Least-squares slope of log(y) against log(n); y is floored at 2^-20 so
// exact points do not blow up the fit.
double loglog_slope(const std::vector<GradePoint>& pts, double GradePoint::*field) {
    const std::size_t m = pts.size();
    double sx = 0, sy = 0;
    std::vector<double> xs(m), ys(m);
    for (std::size_t i = 0; i < m; ++i) {
        xs[i] = std::log2(double(pts[i].n));
        ys[i] = std::log2(std::max(pts[i].*field, 0x1p-20));
        sx += xs[i];
        sy += ys[i];
    }
    const double mx = sx / double(m), my = sy / double(m);
    double num = 0, den = 0;
    for (std::size_t i = 0; i < m; ++i) {
        num += (xs[i] - mx) * (ys[i] - my);
        den += (xs[i] - mx) * (xs[i] - mx);
    }
    require(den > 0, "grade_a_check: sizes must not all coincide");
    return num / den;
}

}  // namespace

GradeReport grade_a_check(const std::vector<GradePoint>& points) {
    require(points.size() >= 4, "grade_a_check: need at least 4 sweep sizes");
    std::size_t n_min = points.front().n, n_max = points.front().n;
    for (const GradePoint& p : points) {
        n_min = std::min(n_min, p.n);
        n_max = std::max(n_max, p.n);
    }
    require(n_max >= 8 * n_min, "grade_a_check: sizes must span at least 8x");

    GradeReport rep;
    for (const GradePoint& p : points)
        rep.c_calibrated = std::max(rep.c_calibrated, p.nat_max_ratio / double(p.n));
    rep.eq1_pass = true;
    for (const GradePoint& p : points)
        if (p.emu_max_ratio > rep.c_calibrated * double(p.n)) rep.eq1_pass = false;
    rep.slope_max = loglog_slope(points, &GradePoint::emu_max_ratio);
    rep.slope_avg = loglog_slope(points, &GradePoint::emu_avg_ratio);
    rep.native_slope_avg = loglog_slope(points, &GradePoint::nat_avg_ratio);
    rep.slope_pass = rep.slope_max <= 1.15;
    rep.grade_a_pass = rep.eq1_pass && rep.slope_pass;
    return rep;
}

const char* csv_header() {
    return "test,n,b,mode,target_bits,esc_bits,slices,fallback,max_err,avg_err,seed";
}

namespace {

void append_number(std::string& out, double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, std::size_t(p - buf));
}

}  // namespace

std::string to_csv(const SweepRow& row) {
    std::string out = row.test;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    if (row.b) out += std::to_string(*row.b);
    out += ',';
    out += row.mode;
    out += ',';
    out += std::to_string(row.target_bits);
    out += ',';
    if (row.esc_bits) out += std::to_string(*row.esc_bits);
    out += ',';
    out += std::to_string(row.slices);
    out += ',';
    out += row.fallback ? '1' : '0';
    out += ',';
    append_number(out, row.max_err);
    out += ',';
    append_number(out, row.avg_err);
    out += ',';
    out += std::to_string(row.seed);
    return out;
}

namespace {

std::string mode_label(const AdpConfig& config) {
    switch (config.mode) {
        case AdpMode::Auto: return "auto";
        case AdpMode::ForceNative: return "native";
        case AdpMode::ForceEmulate: return "emulate:" + std::to_string(config.forced_slices);
    }
    return "auto";
}

SweepRow row_from_trace(const AdpTrace& trace, const AdpConfig& config) {
    SweepRow row;
    row.mode = mode_label(config);
    row.target_bits = config.target_bits;
    if (trace.decision.esc) row.esc_bits = trace.decision.esc->esc_bits;
    row.slices = trace.decision.path == AdpPath::Emulated ? trace.decision.slices : 0;
    row.fallback = trace.decision.path == AdpPath::NativeFallback;
    return row;
}

}  // namespace

std::vector<SweepRow> run_test2_sweep(std::size_t n, const std::vector<int>& b_list,
                                      const std::vector<std::string>& modes, std::uint64_t seed,
                                      const AdpConfig& base) {
    base.validate();
    std::vector<SweepRow> rows;
    rows.reserve(b_list.size() * modes.size());
    for (int b : b_list) {
        const Test2Instance inst = gen_test2(n, b, seed);
        const double xtx = exact_dot(inst.x, inst.x).rounded;
        const MatrixF64 ref = native_gemm(inst.lhs, inst.rhs);
        for (const std::string& mode : modes) {
            AdpConfig cfg = base;
            require(parse_mode(mode, cfg), ("run_test2_sweep: unknown mode: " + mode).c_str());
            auto [c, trace] = adp_gemm(inst.lhs, inst.rhs, 1.0, 0.0, nullptr, cfg);
            const ErrorReport rep = error_report(c, ref, xtx);
            SweepRow row = row_from_trace(trace, cfg);
            row.test = "test2";
            row.n = n;
            row.b = b;
            row.max_err = rep.max_err;
            row.avg_err = rep.avg_err;
            row.seed = seed;
            rows.push_back(std::move(row));
        }
    }
    return rows;
}

UniformGradeResult run_uniform_grade(const std::vector<std::size_t>& n_list, std::uint64_t seed,
                                     const AdpConfig& base) {
    base.validate();
    require(!n_list.empty(), "run_uniform_grade: empty size list");
    UniformGradeResult result;
    Xoshiro256pp root(seed);
    for (std::size_t n : n_list) {
        const std::uint64_t point_seed = root();
        GradePoint p = grade_uniform_point(n, point_seed, base);
        SweepRow emu;
        emu.test = "uniform";
        emu.n = n;
        emu.mode = mode_label(base);
        emu.target_bits = base.target_bits;
        if (p.esc_bits >= 0) emu.esc_bits = p.esc_bits;
        emu.slices = p.slices;
        emu.fallback = p.fallback;
        emu.max_err = p.emu_max_ratio;
        emu.avg_err = p.emu_avg_ratio;
        emu.seed = point_seed;
        SweepRow nat;
        nat.test = "uniform";
        nat.n = n;
        nat.mode = "native";
        nat.target_bits = base.target_bits;
        nat.max_err = p.nat_max_ratio;
        nat.avg_err = p.nat_avg_ratio;
        nat.seed = point_seed;
        result.rows.push_back(std::move(emu));
        result.rows.push_back(std::move(nat));
        result.points.push_back(p);
    }
    result.report = grade_a_check(result.points);
    return result;
}

}  // namespace ozadp
