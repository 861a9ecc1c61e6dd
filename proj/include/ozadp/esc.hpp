#pragma once

#include <cstdint>

#include "ozadp/fpbits.hpp"
#include "ozadp/matrix.hpp"

namespace ozadp {

enum class EscMethod : std::uint8_t { Exact, Coarsened };

// Result of an exponent-span analysis: how many padding bits the dot products
// need beyond the target mantissa width, and the slice budget that implies.
struct EscReport {
    int esc_bits = 0;         // includes the +1 mantissa-product carry margin
    int window_bits = 0;      // target_bits + esc_bits
    int slices_required = 0;  // ceil((window_bits + 2) / 8)
    EscMethod method = EscMethod::Exact;
    std::size_t block_len = 0;  // coarsened only
};

// Slices needed for a window of target_bits + esc_bits: the leading slice
// contributes 6 usable bits (sign and carry headroom), every further slice 8,
// so s = ceil((target_bits + esc_bits + 2) / 8).
int required_slices(int target_bits, int esc_bits);

// Exact span, O(mnk). For each dot product (i,j): z_r is the largest exponent
// sum over positions where both factors are nonzero, and the span is
// rowmaxA_i + colmaxB_j - z_r + 1. Dot products with no nonzero term
// contribute 0. esc_bits is the maximum over all (i,j). Testing oracle and
// small-problem path.
EscReport esc_exact(const MatrixF64& a, const MatrixF64& b, int target_bits);

// Block-coarsened span from precomputed exponent extrema, O(mn*k/b). statsA
// must be by-row over A, statsB by-column over B, with the same block length.
// z_r is replaced by the largest of MaxA+MinB and MinA+MaxB over non-sentinel
// block pairs, which never exceeds the true z_r on matrices whose nonzero
// pattern is dense, so the coarsened span never falls below the exact one
// there (b = 1 gives equality). Production estimator.
EscReport esc_coarsened(const BlockStats& statsA, const BlockStats& statsB, int target_bits);

}  // namespace ozadp
