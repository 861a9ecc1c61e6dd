#include "ozadp/igemm.hpp"

#include <cassert>
#include <cstdlib>

#include "ozadp/exactsum.hpp"

namespace ozadp {

void GemmParams::validate() const {
    require(slices >= 1 && slices <= kMaxSlices, "GemmParams: slices must be in [1, 32]");
    require(chunk_len >= 1 && std::int64_t(chunk_len) * 16384 < (std::int64_t(1) << 31),
            "GemmParams: chunk_len * 16384 must stay below 2^31");
    if (policy.kind == PairPolicy::Kind::DiagonalTruncated)
        require(policy.limit >= 0, "GemmParams: truncation limit must be nonnegative");
}

namespace {

constexpr std::size_t kTile = 32;

// One chunked integer dot product of length k: 32-bit partials, 64-bit total.
inline std::int64_t chunked_dot(const std::int16_t* a, const std::int16_t* b, std::size_t k,
                                std::size_t chunk_len) {
    std::int64_t total = 0;
    for (std::size_t base = 0; base < k; base += chunk_len) {
        const std::size_t end = std::min(k, base + chunk_len);
        std::int32_t s32 = 0;
        for (std::size_t l = base; l < end; ++l) s32 += std::int32_t(a[l]) * b[l];
        assert(std::abs(std::int64_t(s32)) <= std::int64_t(end - base) * 16384);
        total += s32;
    }
    return total;
}

}  // namespace

DiagonalAccumulators slice_pair_mm(const SlicedMatrix& sa, const SlicedMatrix& sb,
                                   const GemmParams& params) {
    params.validate();
    require(sa.orient == Orientation::ByRow, "slice_pair_mm: SA must be sliced by row");
    require(sb.orient == Orientation::ByCol, "slice_pair_mm: SB must be sliced by column");
    require(sa.len == sb.len, "slice_pair_mm: inner dimensions differ");
    require(sa.slices == sb.slices, "slice_pair_mm: slice counts differ");

    const std::size_t m = sa.lines, n = sb.lines, k = sa.len;
    const int s = sa.slices;
    const int diag = 2 * s - 1;

    DiagonalAccumulators out;
    out.m = m;
    out.n = n;
    out.slices = s;
    out.chunk_len = params.chunk_len;
    out.acc.assign(m * n * std::size_t(diag), 0);
    if (m == 0 || n == 0) return out;

    // Widen the int8 planes once; the hot loop then runs pure int16 dots that
    // the compiler vectorizes to 32-bit lane sums.
    std::vector<std::int16_t> wa(std::size_t(s) * m * k), wb(std::size_t(s) * n * k);
#pragma omp parallel for schedule(static)
    for (std::int64_t d = 0; d < s; ++d) {
        const std::int8_t* pa = sa.plane(int(d));
        const std::int8_t* pb = sb.plane(int(d));
        for (std::size_t idx = 0; idx < m * k; ++idx) wa[std::size_t(d) * m * k + idx] = pa[idx];
        for (std::size_t idx = 0; idx < n * k; ++idx) wb[std::size_t(d) * n * k + idx] = pb[idx];
    }

    const std::size_t row_tiles = (m + kTile - 1) / kTile;
    const std::size_t col_tiles = (n + kTile - 1) / kTile;

#pragma omp parallel for schedule(dynamic) collapse(2)
    for (std::int64_t ti = 0; ti < std::int64_t(row_tiles); ++ti) {
        for (std::int64_t tj = 0; tj < std::int64_t(col_tiles); ++tj) {
            const std::size_t i0 = std::size_t(ti) * kTile, i1 = std::min(m, i0 + kTile);
            const std::size_t j0 = std::size_t(tj) * kTile, j1 = std::min(n, j0 + kTile);
            for (int da = 0; da < s; ++da) {
                for (int db = 0; db < s; ++db) {
                    const int d = da + db;
                    if (params.policy.kind == PairPolicy::Kind::DiagonalTruncated &&
                        d > params.policy.limit)
                        continue;
                    const std::int16_t* pa = wa.data() + std::size_t(da) * m * k;
                    const std::int16_t* pb = wb.data() + std::size_t(db) * n * k;
                    for (std::size_t i = i0; i < i1; ++i) {
                        const std::int16_t* arow = pa + i * k;
                        std::int64_t* orow = out.acc.data() + (i * n) * std::size_t(diag) + d;
                        for (std::size_t j = j0; j < j1; ++j)
                            orow[j * std::size_t(diag)] +=
                                chunked_dot(arow, pb + j * k, k, params.chunk_len);
                    }
                }
            }
        }
    }
    return out;
}

MatrixF64 recompose(const DiagonalAccumulators& acc, const std::vector<std::int32_t>& row_scale,
                    const std::vector<std::int32_t>& col_scale, const GemmParams& params,
                    const MatrixF64* cin) {
    require(row_scale.size() == acc.m, "recompose: row scale count mismatch");
    require(col_scale.size() == acc.n, "recompose: column scale count mismatch");
    if (params.beta != 0.0) {
        require(cin != nullptr, "recompose: beta != 0 needs C");
        require(cin->rows() == acc.m && cin->cols() == acc.n, "recompose: C shape mismatch");
    }
    const int diag = acc.diagonals();
    const int dmax = diag - 1;
    MatrixF64 out(acc.m, acc.n);

#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(acc.m); ++i) {
        for (std::size_t j = 0; j < acc.n; ++j) {
            const std::int64_t* e = acc.at(std::size_t(i), j);
            WideInt sum;
            for (int d = 0; d < diag; ++d) sum.add_shifted(e[d], 8 * (dmax - d));
            const long exp2 =
                long(row_scale[std::size_t(i)]) + col_scale[j] - 14 - 8 * long(dmax);
            double v = sum.to_double_scaled(exp2);
            double r = params.alpha * v;
            if (params.beta != 0.0) r = r + params.beta * (*cin)(std::size_t(i), j);
            out(std::size_t(i), j) = r;
        }
    }
    return out;
}

MatrixF64 emulated_gemm(const MatrixF64& a, const MatrixF64& b, const GemmParams& params,
                        const MatrixF64* cin) {
    params.validate();
    require(a.cols() == b.rows(), "emulated_gemm: inner dimensions differ");
    SlicedMatrix sa = decompose(a, Orientation::ByRow, params.slices);
    SlicedMatrix sb = decompose(b, Orientation::ByCol, params.slices);
    DiagonalAccumulators acc = slice_pair_mm(sa, sb, params);
    return recompose(acc, sa.scale_exp, sb.scale_exp, params, cin);
}

}  // namespace ozadp
