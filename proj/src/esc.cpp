#include "ozadp/esc.hpp"

#include <algorithm>
#include <vector>

namespace ozadp {

int required_slices(int target_bits, int esc_bits) {
    require(target_bits >= 1, "required_slices: target_bits must be positive");
    require(esc_bits >= 0, "required_slices: esc_bits must be nonnegative");
    return (target_bits + esc_bits + 2 + 7) / 8;
}

namespace {

EscReport finish(int esc_bits, int target_bits, EscMethod method, std::size_t block_len) {
    EscReport r;
    r.esc_bits = esc_bits;
    r.window_bits = target_bits + esc_bits;
    r.slices_required = required_slices(target_bits, esc_bits);
    r.method = method;
    r.block_len = block_len;
    return r;
}

// Exponent field of a matrix, kNegSentinel at zeros, plus per-line maxima.
// Lines are rows of A (stride cols) or columns of B (stride 1 over a row).
void exponent_field(const MatrixF64& m, bool by_row, std::vector<std::int32_t>& exps,
                    std::vector<std::int32_t>& line_max) {
    const std::size_t lines = by_row ? m.rows() : m.cols();
    const std::size_t len = by_row ? m.cols() : m.rows();
    const std::size_t line_stride = by_row ? m.cols() : 1;
    const std::size_t pos_stride = by_row ? 1 : m.cols();
    exps.assign(lines * len, kNegSentinel);
    line_max.assign(lines, kNegSentinel);
    bool exceptional = false;

#pragma omp parallel for schedule(static) reduction(|| : exceptional)
    for (std::int64_t line = 0; line < std::int64_t(lines); ++line) {
        const double* lp = m.data() + std::size_t(line) * line_stride;
        std::int32_t lmax = kNegSentinel;
        std::int32_t* out = exps.data() + std::size_t(line) * len;
        for (std::size_t pos = 0; pos < len; ++pos) {
            std::uint64_t bits = detail::f64_bits(lp[pos * pos_stride]);
            if (detail::raw_exp_field(bits) == 0x7ff) {
                exceptional = true;
                continue;
            }
            if ((bits << 1) == 0) continue;
            std::int32_t e = detail::effective_exponent_bits(bits);
            out[pos] = e;
            if (e > lmax) lmax = e;
        }
        line_max[std::size_t(line)] = lmax;
    }
    if (exceptional) throw std::domain_error("esc: Inf or NaN input");
}

}  // namespace

EscReport esc_exact(const MatrixF64& a, const MatrixF64& b, int target_bits) {
    require(a.cols() == b.rows(), "esc_exact: inner dimensions differ");
    const std::size_t m = a.rows(), n = b.cols(), k = a.cols();

    std::vector<std::int32_t> ea, eb, rowmax_a, colmax_b;
    exponent_field(a, true, ea, rowmax_a);
    exponent_field(b, false, eb, colmax_b);

    int esc = 0;
#pragma omp parallel for schedule(static) reduction(max : esc)
    for (std::int64_t i = 0; i < std::int64_t(m); ++i) {
        const std::int32_t* arow = ea.data() + std::size_t(i) * k;
        for (std::size_t j = 0; j < n; ++j) {
            const std::int32_t* bcol = eb.data() + j * k;
            std::int32_t z = kNegSentinel;
            for (std::size_t l = 0; l < k; ++l) {
                if (arow[l] == kNegSentinel || bcol[l] == kNegSentinel) continue;
                std::int32_t s = arow[l] + bcol[l];
                if (s > z) z = s;
            }
            if (z == kNegSentinel) continue;  // structurally zero dot product
            int span = rowmax_a[std::size_t(i)] + colmax_b[j] - z + 1;
            if (span > esc) esc = span;
        }
    }
    return finish(esc, target_bits, EscMethod::Exact, 0);
}

EscReport esc_coarsened(const BlockStats& statsA, const BlockStats& statsB, int target_bits) {
    require(statsA.orient == Orientation::ByRow, "esc_coarsened: statsA must be by-row");
    require(statsB.orient == Orientation::ByCol, "esc_coarsened: statsB must be by-column");
    require(statsA.line_len == statsB.line_len, "esc_coarsened: inner dimensions differ");
    require(statsA.block_len == statsB.block_len && statsA.blocks == statsB.blocks,
            "esc_coarsened: mismatched block partitioning");
    const std::size_t m = statsA.lines, n = statsB.lines, t = statsA.blocks;

    int esc = 0;
#pragma omp parallel for schedule(static) reduction(max : esc)
    for (std::int64_t i = 0; i < std::int64_t(m); ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            std::int32_t z = kNegSentinel;
            for (std::size_t blk = 0; blk < t; ++blk) {
                std::int32_t amax = statsA.bmax(std::size_t(i), blk);
                if (amax == kNegSentinel) continue;
                std::int32_t bmax = statsB.bmax(j, blk);
                if (bmax == kNegSentinel) continue;
                std::int32_t cand = std::max(amax + statsB.bmin(j, blk),
                                             statsA.bmin(std::size_t(i), blk) + bmax);
                if (cand > z) z = cand;
            }
            if (z == kNegSentinel) continue;
            int span = statsA.line_max[std::size_t(i)] + statsB.line_max[j] - z + 1;
            if (span > esc) esc = span;
        }
    }
    return finish(esc, target_bits, EscMethod::Coarsened, statsA.block_len);
}

}  // namespace ozadp
