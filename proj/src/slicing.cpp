#include "ozadp/slicing.hpp"

#include "ozadp/exactsum.hpp"

namespace ozadp {

namespace {

// Bits [a, a+8) of x, reading zeros outside x's 64-bit range.
inline std::uint32_t byte_window(std::uint64_t x, long a) {
    if (a >= 64 || a <= -8) return 0;
    if (a >= 0) return std::uint32_t(x >> a) & 0xffu;
    return std::uint32_t(x << -a) & 0xffu;
}

}  // namespace

namespace detail {

void extract_digits(double v, std::int32_t scale_exp, int slices, std::int32_t* lead,
                    std::uint8_t* sub) {
    std::uint64_t bits = f64_bits(v);
    if ((bits << 1) == 0) {
        *lead = 0;
        for (int d = 1; d < slices; ++d) sub[d - 1] = 0;
        return;
    }
    const bool neg = (bits >> 63) != 0;
    const std::uint64_t M = normalized_mantissa(bits);
    const int e = effective_exponent_bits(bits);
    // v * 2^-scale_exp * 2^7 = +/-M * 2^-sh; sh >= 47 because scale_exp >= e+2.
    const long sh = 45 + long(scale_exp) - e;

    if (!neg) {
        *lead = sh < 64 ? std::int32_t(M >> sh) : 0;
        for (int d = 1; d < slices; ++d) sub[d - 1] = std::uint8_t(byte_window(M, sh - 8 * d));
    } else {
        const std::uint64_t Mm1 = M - 1;
        *lead = sh < 64 ? -std::int32_t(Mm1 >> sh) - 1 : -1;
        for (int d = 1; d < slices; ++d) {
            // Remainder of the floor division is 2^sh - (M mod' 2^sh), whose
            // bits inside [0, sh) are the complement of M-1's bits.
            long a = sh - 8 * d;
            std::uint32_t mask = a >= 0 ? 0xffu : (a <= -8 ? 0u : (0xffu << -a) & 0xffu);
            sub[d - 1] = std::uint8_t(~byte_window(Mm1, a) & mask);
        }
    }
}

void element_digits(double v, std::int32_t scale_exp, int slices, std::int8_t* out) {
    std::int32_t lead;
    std::uint8_t sub[kMaxSlices];
    extract_digits(v, scale_exp, slices, &lead, sub);
    int carry = 0;
    for (int d = slices - 1; d >= 1; --d) {
        int c = sub[d - 1] + carry;
        if (c <= 127) {
            out[d] = std::int8_t(c);
            carry = 0;
        } else {
            out[d] = std::int8_t(c - 256);
            carry = 1;
        }
    }
    out[0] = std::int8_t(lead + carry);
}

}  // namespace detail

std::vector<std::int8_t> remap_digits(const DigitChain& chain) {
    // Decomposition produces leads in [-64, 63]; standalone chains may use the
    // full signed-byte range as long as a final carry cannot overflow it.
    require(chain.lead >= -128 && chain.lead <= 126, "remap_digits: lead out of range");
    std::vector<std::int8_t> out(chain.sub.size() + 1);
    int carry = 0;
    for (std::size_t d = chain.sub.size(); d >= 1; --d) {
        int c = chain.sub[d - 1] + carry;
        if (c <= 127) {
            out[d] = std::int8_t(c);
            carry = 0;
        } else {
            out[d] = std::int8_t(c - 256);
            carry = 1;
        }
    }
    out[0] = std::int8_t(chain.lead + carry);
    return out;
}

SlicedMatrix decompose(const MatrixF64& m, Orientation orient, int slices) {
    require(slices >= 1 && slices <= kMaxSlices, "decompose: slices must be in [1, 32]");
    SlicedMatrix s;
    s.orient = orient;
    s.lines = orient == Orientation::ByRow ? m.rows() : m.cols();
    s.len = orient == Orientation::ByRow ? m.cols() : m.rows();
    s.slices = slices;
    s.digits.assign(std::size_t(slices) * s.lines * s.len, 0);
    s.scale_exp.assign(s.lines, 0);

    const std::size_t line_stride = orient == Orientation::ByRow ? m.cols() : 1;
    const std::size_t pos_stride = orient == Orientation::ByRow ? 1 : m.cols();
    const std::size_t plane_stride = s.lines * s.len;
    const double* base = m.data();
    const std::int64_t lines = std::int64_t(s.lines);
    bool exceptional = false;

#pragma omp parallel for schedule(static) reduction(|| : exceptional)
    for (std::int64_t line = 0; line < lines; ++line) {
        const double* lp = base + std::size_t(line) * line_stride;
        std::int32_t lmax = kNegSentinel;
        for (std::size_t pos = 0; pos < s.len; ++pos) {
            std::uint64_t bits = detail::f64_bits(lp[pos * pos_stride]);
            if (detail::raw_exp_field(bits) == 0x7ff) {
                exceptional = true;
                continue;
            }
            if ((bits << 1) == 0) continue;
            std::int32_t e = detail::effective_exponent_bits(bits);
            if (e > lmax) lmax = e;
        }
        if (lmax == kNegSentinel) continue;  // all-zero line: digits stay 0, scale 0
        const std::int32_t E = lmax + 2;
        s.scale_exp[std::size_t(line)] = E;

        std::int8_t dig[kMaxSlices];
        std::int8_t* lbase = s.digits.data() + std::size_t(line) * s.len;
        for (std::size_t pos = 0; pos < s.len; ++pos) {
            double v = lp[pos * pos_stride];
            if (v == 0.0) continue;
            detail::element_digits(v, E, slices, dig);
            for (int d = 0; d < slices; ++d) lbase[std::size_t(d) * plane_stride + pos] = dig[d];
        }
    }
    if (exceptional) throw std::domain_error("decompose: Inf or NaN input");
    return s;
}

MatrixF64 reconstruct(const SlicedMatrix& s) {
    const std::size_t rows = s.orient == Orientation::ByRow ? s.lines : s.len;
    const std::size_t cols = s.orient == Orientation::ByRow ? s.len : s.lines;
    MatrixF64 m(rows, cols);
    const std::size_t plane_stride = s.lines * s.len;
    const std::int64_t lines = std::int64_t(s.lines);

#pragma omp parallel for schedule(static)
    for (std::int64_t line = 0; line < lines; ++line) {
        const long scale = long(s.scale_exp[std::size_t(line)]) - (8 * s.slices - 1);
        const std::int8_t* lbase = s.digits.data() + std::size_t(line) * s.len;
        for (std::size_t pos = 0; pos < s.len; ++pos) {
            WideInt t;
            for (int d = 0; d < s.slices; ++d)
                t.add_shifted(lbase[std::size_t(d) * plane_stride + pos], 8 * (s.slices - 1 - d));
            double v = t.to_double_scaled(scale);
            if (s.orient == Orientation::ByRow)
                m(std::size_t(line), pos) = v;
            else
                m(pos, std::size_t(line)) = v;
        }
    }
    return m;
}

}  // namespace ozadp
