#pragma once

#include "ozadp/exactsum.hpp"
#include "ozadp/matrix.hpp"

namespace ozadp {

// Plain FP64 GEMM: alpha*A*B + beta*C with each dot product summed in
// ascending k order by separate multiply and add (no FMA; the build disables
// contraction). beta == 0 ignores C entirely, BLAS style. Exceptional values
// flow through under IEEE semantics; this is the fallback target.
MatrixF64 native_gemm(const MatrixF64& a, const MatrixF64& b, double alpha = 1.0,
                      double beta = 0.0, const MatrixF64* c = nullptr);

// Exact dot product of two vectors as an arbitrary-precision scalar plus its
// correctly rounded FP64 value. Rejects Inf/NaN inputs.
struct ExactDot {
    ExactScalar exact;
    double rounded = 0.0;
};
ExactDot exact_dot(const std::vector<double>& x, const std::vector<double>& y);

// Correctly rounded product matrix: every element is the exact dot product
// rounded once to FP64. Cost is O(m*n*k) exact accumulations; desk scale
// only. Rejects Inf/NaN inputs.
MatrixF64 exact_gemm(const MatrixF64& a, const MatrixF64& b);

}  // namespace ozadp
