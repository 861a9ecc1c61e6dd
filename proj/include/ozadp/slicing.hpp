#pragma once

#include <cstdint>
#include <vector>

#include "ozadp/fpbits.hpp"
#include "ozadp/matrix.hpp"

namespace ozadp {

inline constexpr int kMaxSlices = 32;

// Fixed-point slice planes of a matrix. Lines (rows for ByRow, columns for
// ByCol) are stored contiguously inside each plane, so plane(d) is a
// lines x len row-major int8 array. Slice d of line L carries weight
// 2^(scale_exp[L] - 7 - 8d): the leading plane holds signed digits in
// [-64, 64], sub-leading planes hold remapped digits in [-128, 127].
struct SlicedMatrix {
    Orientation orient = Orientation::ByRow;
    std::size_t lines = 0;
    std::size_t len = 0;
    int slices = 0;
    std::vector<std::int8_t> digits;      // slices planes of lines*len each
    std::vector<std::int32_t> scale_exp;  // per line; 0 for all-zero lines

    std::int8_t* plane(int d) { return digits.data() + std::size_t(d) * lines * len; }
    const std::int8_t* plane(int d) const { return digits.data() + std::size_t(d) * lines * len; }
    std::int8_t digit(int d, std::size_t line, std::size_t pos) const {
        return plane(d)[line * len + pos];
    }
};

// Unsigned digit chain: value = lead * 2^(8*sub.size()) + sum sub[i] * 2^(8*(size-1-i)).
// This is the raw extraction form, before the signed remapping.
struct DigitChain {
    std::int32_t lead = 0;              // in [-64, 63]
    std::vector<std::uint8_t> sub;      // each in [0, 255]
};

// Two's-complement remapping of an unsigned chain into signed int8 digits,
// processed least-significant first with carry propagation into the leading
// digit. Value preserving; the stored byte of each digit keeps the bit
// pattern of its (carry-adjusted) unsigned value. Leads from decompose are in
// [-64, 63] and remap to [-64, 64]; any lead in [-128, 126] is accepted.
std::vector<std::int8_t> remap_digits(const DigitChain& chain);

// Decompose into `slices` signed fixed-point planes. Throws std::domain_error
// on Inf/NaN input and std::invalid_argument for slices outside [1, 32].
SlicedMatrix decompose(const MatrixF64& m, Orientation orient, int slices);

// Exact digit recombination, one rounding per element. Exact whenever the
// capacity 8*slices-2 covers each element's exponent deficit plus 53 bits.
MatrixF64 reconstruct(const SlicedMatrix& s);

namespace detail {

// Digits of the scaled value v * 2^-E truncated toward -infinity to
// 7 + 8*(slices-1) fractional bits: out[0] in [-64, 63] plus slices-1
// unsigned base-256 digits. Exact bit arithmetic on the 53-bit mantissa.
void extract_digits(double v, std::int32_t scale_exp, int slices, std::int32_t* lead,
                    std::uint8_t* sub);

// Fused extract + remap used by decompose; writes `slices` signed digits.
void element_digits(double v, std::int32_t scale_exp, int slices, std::int8_t* out);

}  // namespace detail

}  // namespace ozadp
