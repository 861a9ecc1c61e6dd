#pragma once

#include <cassert>
#include <cmath>
#include <cstdint>
#include <vector>

#include "ozadp/fpbits.hpp"

namespace ozadp {

namespace detail {

using u128 = unsigned __int128;

// Bits [lo, hi] of a little-endian limb array, zero beyond either end.
// hi - lo <= 63. Negative lo shifts the window below bit 0 (reads zeros).
inline std::uint64_t extract_field(const std::uint64_t* limbs, int nlimbs, long lo, long hi) {
    if (hi < lo) return 0;
    if (lo < 0) {
        if (hi < 0) return 0;
        return extract_field(limbs, nlimbs, 0, hi) << (-lo);
    }
    long q = lo >> 6;
    int r = int(lo & 63);
    std::uint64_t v = 0;
    if (q < nlimbs) {
        v = limbs[q] >> r;
        if (r != 0 && q + 1 < nlimbs) v |= limbs[q + 1] << (64 - r);
    }
    int width = int(hi - lo + 1);
    return width >= 64 ? v : (v & ((std::uint64_t{1} << width) - 1));
}

inline bool any_bits_below(const std::uint64_t* limbs, int nlimbs, long idx) {
    if (idx <= 0) return false;
    long q = idx >> 6;
    int r = int(idx & 63);
    for (long i = 0; i < q && i < nlimbs; ++i)
        if (limbs[i]) return true;
    if (r != 0 && q < nlimbs && (limbs[q] & ((std::uint64_t{1} << r) - 1))) return true;
    return false;
}

// Round-to-nearest-even conversion of magnitude * 2^exp2 to double, with the
// given sign. Handles gradual underflow and overflow to +/-Inf. The magnitude
// must be the value's absolute value; zero input returns +0.0 regardless of
// the sign flag (callers produce signed zeros themselves where IEEE needs
// them).
inline double round_mag_to_double(const std::uint64_t* limbs, int nlimbs, long exp2, bool negative) {
    long top = -1;
    for (int i = nlimbs - 1; i >= 0; --i) {
        if (limbs[i]) {
            top = long(i) * 64 + (63 - std::countl_zero(limbs[i]));
            break;
        }
    }
    if (top < 0) return 0.0;

    long e = top + exp2;  // floor(log2 |value|)
    long p = e >= -1022 ? top - 52 : -1074 - exp2;
    std::uint64_t m = extract_field(limbs, nlimbs, p, top);
    bool round = p - 1 >= 0 && p - 1 <= top && ((limbs[(p - 1) >> 6] >> ((p - 1) & 63)) & 1);
    bool sticky = any_bits_below(limbs, nlimbs, p - 1);
    if (round && (sticky || (m & 1))) {
        ++m;
        if (m == (std::uint64_t{1} << 53)) {
            m >>= 1;
            ++p;
        }
    }
    double r = std::ldexp(double(m), int(p + exp2));
    return negative ? -r : r;
}

}  // namespace detail

// Exact value: sign * magnitude * 2^exp2 with the magnitude normalized to be
// odd (or empty when the value is zero, with exp2 = 0). The canonical form
// makes operator== a value comparison.
struct ExactScalar {
    int sign = 0;  // -1, 0, +1
    std::vector<std::uint64_t> mag;
    std::int64_t exp2 = 0;

    bool is_zero() const { return sign == 0; }

    double to_double() const {
        if (sign == 0) return 0.0;
        return detail::round_mag_to_double(mag.data(), int(mag.size()), long(exp2), sign < 0);
    }

    bool operator==(const ExactScalar&) const = default;
};

// Fixed-width two's-complement integer for the exact combination of diagonal
// accumulators: 768 bits cover |acc| < 2^63 shifted by up to 8*(2*32-2) bits.
struct WideInt {
    static constexpr int kLimbs = 12;
    std::uint64_t limb[kLimbs] = {};

    void clear() {
        for (auto& l : limb) l = 0;
    }

    bool is_zero() const {
        for (auto l : limb)
            if (l) return false;
        return true;
    }

    bool negative() const { return (limb[kLimbs - 1] >> 63) != 0; }

    // this += v * 2^shift. shift in [0, 8*62]; total must stay within range.
    void add_shifted(std::int64_t v, int shift) {
        if (v == 0) return;
        int q = shift >> 6;
        int r = shift & 63;
        detail::u128 a = detail::u128(std::uint64_t(v)) << r;  // low 128 bits of addend
        std::uint64_t sext = v < 0 ? ~std::uint64_t{0} : 0;
        std::uint64_t add_lo = std::uint64_t(a);
        std::uint64_t add_hi = r == 0 ? sext : std::uint64_t(a >> 64) | (sext << r);
        std::uint64_t carry = 0;
        detail::u128 t = detail::u128(limb[q]) + add_lo;
        limb[q] = std::uint64_t(t);
        carry = std::uint64_t(t >> 64);
        if (q + 1 < kLimbs) {
            t = detail::u128(limb[q + 1]) + add_hi + carry;
            limb[q + 1] = std::uint64_t(t);
            carry = std::uint64_t(t >> 64);
        }
        for (int i = q + 2; i < kLimbs; ++i) {
            if (sext == 0 && carry == 0) break;
            if (sext == ~std::uint64_t{0} && carry == 1) break;  // net zero
            t = detail::u128(limb[i]) + sext + carry;
            limb[i] = std::uint64_t(t);
            carry = std::uint64_t(t >> 64);
        }
    }

    // Round value * 2^exp2 to the nearest double. Exactly-zero values give
    // +0.0; exponent overflow gives +/-Inf.
    double to_double_scaled(long exp2) const {
        std::uint64_t mag[kLimbs];
        bool neg = negative();
        if (neg) {
            std::uint64_t carry = 1;
            for (int i = 0; i < kLimbs; ++i) {
                detail::u128 t = detail::u128(~limb[i]) + carry;
                mag[i] = std::uint64_t(t);
                carry = std::uint64_t(t >> 64);
            }
        } else {
            for (int i = 0; i < kLimbs; ++i) mag[i] = limb[i];
        }
        return detail::round_mag_to_double(mag, kLimbs, exp2, neg);
    }
};

// Exact sum of FP64 values and FP64 products in a fixed-point accumulator.
// 32-bit windows are accumulated into 64-bit chunks; carries are deferred and
// propagated at renorm() time, so a single add never walks the whole array.
class Superaccumulator {
public:
    static constexpr int kChunks = 140;
    static constexpr long kBaseExp = -2272;  // weight of chunk 0, bit 0
    static constexpr std::uint32_t kRenormEvery = 1u << 28;

    Superaccumulator() { clear(); }

    void clear() {
        for (auto& c : chunk_) c = 0;
        pending_ = 0;
    }

    // this += a * b, exactly. Operands must be finite.
    void add_product(double a, double b) {
        std::uint64_t ba = detail::f64_bits(a);
        std::uint64_t bb = detail::f64_bits(b);
        assert(detail::raw_exp_field(ba) != 0x7ff && detail::raw_exp_field(bb) != 0x7ff);
        if ((ba << 1) == 0 || (bb << 1) == 0) return;
        std::uint64_t ma = detail::normalized_mantissa(ba);
        std::uint64_t mb = detail::normalized_mantissa(bb);
        detail::u128 p = detail::u128(ma) * mb;
        long w = long(detail::effective_exponent_bits(ba)) + detail::effective_exponent_bits(bb) - 104;
        bool neg = ((ba ^ bb) >> 63) != 0;
        add_bits64(std::uint64_t(p), w, neg);
        std::uint64_t hi = std::uint64_t(p >> 64);
        if (hi) add_bits64(hi, w + 64, neg);
        bump();
    }

    // this += a, exactly. Operand must be finite.
    void add_value(double a) {
        std::uint64_t ba = detail::f64_bits(a);
        assert(detail::raw_exp_field(ba) != 0x7ff);
        if ((ba << 1) == 0) return;
        add_bits64(detail::normalized_mantissa(ba), long(detail::effective_exponent_bits(ba)) - 52,
                   (ba >> 63) != 0);
        bump();
    }

    // Propagate deferred carries into canonical base-2^32 digits. Value
    // preserving; safe to call at any time.
    void renorm() {
        std::int64_t carry = 0;
        for (int c = 0; c < kChunks - 1; ++c) {
            std::int64_t t = chunk_[c] + carry;
            std::int64_t low = t & 0xffffffffll;
            carry = (t - low) >> 32;
            chunk_[c] = low;
        }
        chunk_[kChunks - 1] += carry;
        pending_ = 0;
    }

    bool exactly_zero() {
        renorm();
        for (auto c : chunk_)
            if (c) return false;
        return true;
    }

    // Correctly rounded (nearest-even) value; exact zero gives +0.0.
    double to_double() {
        renorm();
        std::uint64_t limbs[kChunks / 2];
        bool neg = digits_to_magnitude(limbs);
        return detail::round_mag_to_double(limbs, kChunks / 2, kBaseExp, neg);
    }

    ExactScalar to_exact() {
        renorm();
        std::uint64_t limbs[kChunks / 2];
        bool neg = digits_to_magnitude(limbs);
        ExactScalar out;
        int top = kChunks / 2 - 1;
        while (top >= 0 && limbs[top] == 0) --top;
        if (top < 0) return out;
        int tz = 0;
        while (limbs[tz >> 6] == 0 || ((limbs[tz >> 6] >> (tz & 63)) & 1) == 0) ++tz;
        out.sign = neg ? -1 : 1;
        out.exp2 = kBaseExp + tz;
        out.mag.resize(std::size_t(top) + 1);
        for (int i = 0; i <= top; ++i)
            out.mag[std::size_t(i)] = detail::extract_field(limbs, kChunks / 2, i * 64 + tz, i * 64 + tz + 63);
        while (!out.mag.empty() && out.mag.back() == 0) out.mag.pop_back();
        return out;
    }

private:
    void bump() {
        if (++pending_ >= kRenormEvery) renorm();
    }

    // Add |x| * 2^w with the given sign; x occupies at most 64 bits.
    void add_bits64(std::uint64_t x, long w, bool neg) {
        long off = w - kBaseExp;
        assert(off >= 0);
        int q = int(off >> 5);
        int r = int(off & 31);
        detail::u128 t = detail::u128(x) << r;
        std::int64_t w0 = std::int64_t(std::uint64_t(t) & 0xffffffffu);
        std::int64_t w1 = std::int64_t(std::uint64_t(t >> 32) & 0xffffffffu);
        std::int64_t w2 = std::int64_t(std::uint64_t(t >> 64) & 0xffffffffu);
        if (neg) {
            chunk_[q] -= w0;
            if (w1) chunk_[q + 1] -= w1;
            if (w2) chunk_[q + 2] -= w2;
        } else {
            chunk_[q] += w0;
            if (w1) chunk_[q + 1] += w1;
            if (w2) chunk_[q + 2] += w2;
        }
    }

    // Canonical digits -> magnitude limbs; returns the sign. Requires renorm.
    bool digits_to_magnitude(std::uint64_t* limbs) const {
        bool neg = chunk_[kChunks - 1] < 0;
        std::uint32_t digits[kChunks];
        if (neg) {
            std::uint64_t carry = 1;
            for (int c = 0; c < kChunks; ++c) {
                std::uint64_t t = std::uint64_t(~std::uint32_t(chunk_[c])) + carry;
                digits[c] = std::uint32_t(t);
                carry = t >> 32;
            }
        } else {
            for (int c = 0; c < kChunks; ++c) digits[c] = std::uint32_t(chunk_[c]);
        }
        for (int i = 0; i < kChunks / 2; ++i)
            limbs[i] = std::uint64_t(digits[2 * i]) | (std::uint64_t(digits[2 * i + 1]) << 32);
        return neg;
    }

    std::int64_t chunk_[kChunks];
    std::uint32_t pending_ = 0;
};

}  // namespace ozadp
