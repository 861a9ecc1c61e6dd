#include "ozadp/ref_kernels.hpp"

#include <algorithm>

namespace ozadp {

MatrixF64 ref_gemm_serial(const MatrixF64& a, const MatrixF64& b, double alpha, double beta,
                          const MatrixF64* c) {
    require(a.cols() == b.rows(), "ref_gemm_serial: inner dimensions differ");
    if (beta != 0.0) {
        require(c != nullptr, "ref_gemm_serial: beta != 0 needs C");
        require(c->rows() == a.rows() && c->cols() == b.cols(),
                "ref_gemm_serial: C shape mismatch");
    }
    const std::size_t m = a.rows(), n = b.cols(), k = a.cols();
    MatrixF64 out(m, n);
    for (std::size_t i = 0; i < m; ++i) {
        const double* arow = a.row_ptr(i);
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t l = 0; l < k; ++l) sum = sum + arow[l] * b(l, j);
            double r = alpha * sum;
            if (beta != 0.0) r = r + beta * (*c)(i, j);
            out(i, j) = r;
        }
    }
    return out;
}

DiagonalAccumulators ref_slice_pair_mm(const SlicedMatrix& sa, const SlicedMatrix& sb,
                                       const GemmParams& params) {
    params.validate();
    require(sa.orient == Orientation::ByRow, "ref_slice_pair_mm: SA must be sliced by row");
    require(sb.orient == Orientation::ByCol, "ref_slice_pair_mm: SB must be sliced by column");
    require(sa.len == sb.len, "ref_slice_pair_mm: inner dimensions differ");
    require(sa.slices == sb.slices, "ref_slice_pair_mm: slice counts differ");

    const std::size_t m = sa.lines, n = sb.lines, k = sa.len;
    const int s = sa.slices;

    DiagonalAccumulators out;
    out.m = m;
    out.n = n;
    out.slices = s;
    out.chunk_len = params.chunk_len;
    out.acc.assign(m * n * std::size_t(out.diagonals()), 0);

    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::int64_t* e = out.at(i, j);
            for (int da = 0; da < s; ++da) {
                for (int db = 0; db < s; ++db) {
                    const int d = da + db;
                    if (params.policy.kind == PairPolicy::Kind::DiagonalTruncated &&
                        d > params.policy.limit)
                        continue;
                    const std::int8_t* arow = sa.plane(da) + i * k;
                    const std::int8_t* bcol = sb.plane(db) + j * k;
                    std::int64_t total = 0;
                    for (std::size_t base = 0; base < k; base += params.chunk_len) {
                        const std::size_t end = std::min(k, base + params.chunk_len);
                        std::int32_t s32 = 0;
                        for (std::size_t l = base; l < end; ++l)
                            s32 += std::int32_t(arow[l]) * bcol[l];
                        total += s32;
                    }
                    e[d] += total;
                }
            }
        }
    }
    return out;
}

MatrixF64 ref_emulated_gemm(const MatrixF64& a, const MatrixF64& b, const GemmParams& params,
                            const MatrixF64* cin) {
    params.validate();
    require(a.cols() == b.rows(), "ref_emulated_gemm: inner dimensions differ");
    SlicedMatrix sa = decompose(a, Orientation::ByRow, params.slices);
    SlicedMatrix sb = decompose(b, Orientation::ByCol, params.slices);
    DiagonalAccumulators acc = ref_slice_pair_mm(sa, sb, params);
    return recompose(acc, sa.scale_exp, sb.scale_exp, params, cin);
}

}  // namespace ozadp
