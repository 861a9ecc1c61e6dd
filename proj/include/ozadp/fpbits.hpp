#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "ozadp/matrix.hpp"

namespace ozadp {

enum class FloatKind : std::uint8_t { Zero, Denormal, Normal, Inf, NaN };

struct FloatClass {
    FloatKind kind;
    bool negative;
};

// Marker for the exponent of an all-zero block or line. Far below any sum of
// two real FP64 exponents (>= -2148), so sentinel arithmetic cannot collide
// with real values.
inline constexpr std::int32_t kNegSentinel = -1000000;

namespace detail {

inline constexpr std::uint64_t kMantMask = (std::uint64_t{1} << 52) - 1;

inline std::uint64_t f64_bits(double v) { return std::bit_cast<std::uint64_t>(v); }

inline int raw_exp_field(std::uint64_t bits) { return int((bits >> 52) & 0x7ff); }

// Effective exponent of a nonzero finite double whose bits are given.
// floor(log2|v|): biased exponent for normals, top-bit position for denormals.
inline int effective_exponent_bits(std::uint64_t bits) {
    int e = raw_exp_field(bits);
    if (e != 0) return e - 1023;
    std::uint64_t mant = bits & kMantMask;
    return (63 - std::countl_zero(mant)) - 1074;
}

// Mantissa normalized to [2^52, 2^53) so that v = +/- mant * 2^(e-52) exactly,
// with e the effective exponent. Works for normals and denormals.
inline std::uint64_t normalized_mantissa(std::uint64_t bits) {
    int e = raw_exp_field(bits);
    std::uint64_t mant = bits & kMantMask;
    if (e != 0) return mant | (std::uint64_t{1} << 52);
    return mant << (52 - (63 - std::countl_zero(mant)));
}

}  // namespace detail

inline FloatClass float_class(double v) {
    std::uint64_t bits = detail::f64_bits(v);
    bool neg = (bits >> 63) != 0;
    int e = detail::raw_exp_field(bits);
    std::uint64_t mant = bits & detail::kMantMask;
    FloatKind kind;
    if (e == 0x7ff) {
        kind = mant ? FloatKind::NaN : FloatKind::Inf;
    } else if (e == 0) {
        kind = mant ? FloatKind::Denormal : FloatKind::Zero;
    } else {
        kind = FloatKind::Normal;
    }
    return {kind, neg};
}

// floor(log2|v|) for nonzero finite v; throws on zero, Inf, NaN.
inline int effective_exponent(double v) {
    std::uint64_t bits = detail::f64_bits(v);
    int e = detail::raw_exp_field(bits);
    std::uint64_t mant = bits & detail::kMantMask;
    if (e == 0x7ff) throw std::domain_error("effective_exponent: Inf or NaN");
    if (e == 0 && mant == 0) throw std::domain_error("effective_exponent: zero");
    return detail::effective_exponent_bits(bits);
}

struct ScanReport {
    std::uint64_t nan_count = 0;
    std::uint64_t inf_count = 0;
    std::uint64_t negzero_count = 0;
    bool has_exceptional = false;  // true iff nan_count + inf_count > 0
};

ScanReport scan_matrix(const MatrixF64& m);

enum class Orientation : std::uint8_t { ByRow, ByCol };

// Per-line, per-block exponent extrema. Lines are rows (ByRow) or columns
// (ByCol); blocks partition each line into ceil(line_len / block_len) pieces.
// All-zero blocks and lines carry kNegSentinel.
struct BlockStats {
    Orientation orient = Orientation::ByRow;
    std::size_t lines = 0;
    std::size_t line_len = 0;
    std::size_t block_len = 0;
    std::size_t blocks = 0;
    std::vector<std::int32_t> max_exp;   // lines * blocks
    std::vector<std::int32_t> min_exp;   // lines * blocks
    std::vector<std::int32_t> line_max;  // lines

    std::int32_t bmax(std::size_t line, std::size_t blk) const { return max_exp[line * blocks + blk]; }
    std::int32_t bmin(std::size_t line, std::size_t blk) const { return min_exp[line * blocks + blk]; }
};

// Throws std::domain_error if the matrix contains Inf or NaN.
BlockStats block_exponent_stats(const MatrixF64& m, Orientation orient, std::size_t block_len);

}  // namespace ozadp
