#pragma once

#include "ozadp/igemm.hpp"
#include "ozadp/matrix.hpp"
#include "ozadp/slicing.hpp"

namespace ozadp {

// Plain serial counterparts of the OpenMP kernels, kept for differential
// testing and benchmarking. Same contracts, same results bit for bit: the
// FP64 loop mirrors the parallel accumulation order exactly, and the integer
// contraction is exact in any order.

MatrixF64 ref_gemm_serial(const MatrixF64& a, const MatrixF64& b, double alpha = 1.0,
                          double beta = 0.0, const MatrixF64* c = nullptr);

DiagonalAccumulators ref_slice_pair_mm(const SlicedMatrix& sa, const SlicedMatrix& sb,
                                       const GemmParams& params);

// decompose -> ref_slice_pair_mm -> recompose; decompose and recompose are
// elementwise-deterministic, so the serial path only replaces the
// contraction kernel.
MatrixF64 ref_emulated_gemm(const MatrixF64& a, const MatrixF64& b, const GemmParams& params,
                            const MatrixF64* cin = nullptr);

}  // namespace ozadp
