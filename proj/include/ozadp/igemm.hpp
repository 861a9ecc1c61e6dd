#pragma once

#include <cstdint>
#include <vector>

#include "ozadp/matrix.hpp"
#include "ozadp/slicing.hpp"

namespace ozadp {

// Which slice pairs participate. Full keeps all s^2 products; the accuracy
// guarantee assumes it. DiagonalTruncated drops pairs whose combined
// significance d_a + d_b exceeds `limit`; experiment flag only.
struct PairPolicy {
    enum class Kind : std::uint8_t { Full, DiagonalTruncated };
    Kind kind = Kind::Full;
    int limit = 0;  // largest admitted d_a + d_b when truncated
};

struct GemmParams {
    double alpha = 1.0;
    double beta = 0.0;
    int slices = 7;
    std::size_t chunk_len = 65536;  // int8*int8 products per 32-bit chunk
    PairPolicy policy;

    // Bounds that keep the 32-bit chunk sums from wrapping: max |product| is
    // 128*128 = 16384, so chunk_len * 16384 must stay below 2^31.
    void validate() const;
};

// Integer dot-product partial sums: one signed 64-bit accumulator per output
// element and diagonal D = d_a + d_b in [0, 2s-2], element-major layout.
struct DiagonalAccumulators {
    std::size_t m = 0, n = 0;
    int slices = 0;
    std::size_t chunk_len = 0;
    std::vector<std::int64_t> acc;  // m*n*(2s-1)

    int diagonals() const { return 2 * slices - 1; }
    std::int64_t* at(std::size_t i, std::size_t j) {
        return acc.data() + (i * n + j) * std::size_t(diagonals());
    }
    const std::int64_t* at(std::size_t i, std::size_t j) const {
        return acc.data() + (i * n + j) * std::size_t(diagonals());
    }
};

// All admitted slice-pair products, accumulated per diagonal. SA must be
// by-row over A (m x k), SB by-column over B (k x n), equal slice counts.
// Inner sums run in 32-bit integers over chunks of at most chunk_len products
// and widen to 64 bits between chunks, modeling INT8 MMA with 32-bit
// accumulators. Bitwise deterministic for any schedule: every sum here is
// exact in integers.
DiagonalAccumulators slice_pair_mm(const SlicedMatrix& sa, const SlicedMatrix& sb,
                                   const GemmParams& params);

// Combine the diagonals of each element exactly in wide integers, apply the
// two scale exponents and digit weights, and round once to FP64; then apply
// alpha (and beta*Cin) in ordinary FP64 arithmetic. Exact zero sums give
// +0.0; terminal overflow gives +/-Inf with the sign of the exact sum.
MatrixF64 recompose(const DiagonalAccumulators& acc, const std::vector<std::int32_t>& row_scale,
                    const std::vector<std::int32_t>& col_scale, const GemmParams& params,
                    const MatrixF64* cin = nullptr);

// decompose -> slice_pair_mm -> recompose at params.slices. A and B must be
// finite. Bitwise reproducible across runs, chunk sizes and thread counts.
MatrixF64 emulated_gemm(const MatrixF64& a, const MatrixF64& b, const GemmParams& params,
                        const MatrixF64* cin = nullptr);

}  // namespace ozadp
