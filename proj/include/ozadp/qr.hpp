#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "ozadp/adp.hpp"
#include "ozadp/matrix.hpp"

namespace ozadp {

// Blocked Householder QR in compact WY form. factors holds R in the upper
// triangle and the reflector tails below the diagonal (unit-diagonal
// convention, tails normalized); t_blocks holds one upper-triangular T per
// panel with the tau scalars on its diagonal; traces records the dispatch
// decision of every trailing-update GEMM, three per panel, in call order.
struct QrResult {
    MatrixF64 factors;
    std::vector<MatrixF64> t_blocks;
    std::vector<AdpTrace> traces;
    std::size_t panel = 0;
};

// Factors an m x n matrix, m >= n >= 1. Panel factorization and T
// construction run in native FP64 (level-2 work); the three trailing-update
// products per panel (W = Y^T A_s, W = T^T W, A_s -= Y W) all route through
// adp_gemm under gemm_config, including degenerate tails with no trailing
// columns. n need not be a multiple of panel: a final narrow panel handles
// the remainder. Reflectors are chosen so the R diagonal is nonnegative.
QrResult geqrf_blocked(const MatrixF64& a, std::size_t panel,
                       const AdpConfig& gemm_config = AdpConfig{});

// Thin Q (m x n), accumulated natively from the WY blocks.
MatrixF64 materialize_q(const QrResult& qr);

// The n x n upper triangle of the factors.
MatrixF64 upper_r(const QrResult& qr);

// Factorization quality: relative residual |A0 - QR|_F / |A0|_F and
// orthogonality defect |I - Q^T Q|_F, both via native FP64.
struct QrAccuracy {
    double residual = 0.0;
    double orthogonality = 0.0;
};
QrAccuracy qr_residual(const MatrixF64& a0, const QrResult& qr);

// Histogram of the trailing-update dispatches: header `slices,count`, one row
// per observed slice count in increasing order, and a final
// `native_fallback,count` row.
std::string histogram_csv(const std::vector<AdpTrace>& traces);

}  // namespace ozadp
