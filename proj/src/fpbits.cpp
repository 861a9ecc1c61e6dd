#include "ozadp/fpbits.hpp"

namespace ozadp {

ScanReport scan_matrix(const MatrixF64& m) {
    const double* p = m.data();
    const std::int64_t n = std::int64_t(m.size());
    std::uint64_t nans = 0, infs = 0, negz = 0;
#pragma omp parallel for reduction(+ : nans, infs, negz) schedule(static)
    for (std::int64_t i = 0; i < n; ++i) {
        std::uint64_t bits = detail::f64_bits(p[i]);
        int e = detail::raw_exp_field(bits);
        std::uint64_t mant = bits & detail::kMantMask;
        if (e == 0x7ff) {
            if (mant)
                ++nans;
            else
                ++infs;
        } else if (e == 0 && mant == 0 && (bits >> 63)) {
            ++negz;
        }
    }
    return {nans, infs, negz, nans + infs > 0};
}

BlockStats block_exponent_stats(const MatrixF64& m, Orientation orient, std::size_t block_len) {
    require(block_len >= 1, "block_exponent_stats: block_len must be >= 1");
    BlockStats st;
    st.orient = orient;
    st.lines = orient == Orientation::ByRow ? m.rows() : m.cols();
    st.line_len = orient == Orientation::ByRow ? m.cols() : m.rows();
    st.block_len = block_len;
    st.blocks = st.line_len == 0 ? 0 : (st.line_len + block_len - 1) / block_len;
    st.max_exp.assign(st.lines * st.blocks, kNegSentinel);
    st.min_exp.assign(st.lines * st.blocks, kNegSentinel);
    st.line_max.assign(st.lines, kNegSentinel);

    const std::size_t row_stride = orient == Orientation::ByRow ? m.cols() : 1;
    const std::size_t pos_stride = orient == Orientation::ByRow ? 1 : m.cols();
    const double* base = m.data();
    const std::int64_t lines = std::int64_t(st.lines);
    bool exceptional = false;  // exceptions must not escape the parallel region

#pragma omp parallel for schedule(static) reduction(|| : exceptional)
    for (std::int64_t line = 0; line < lines; ++line) {
        const double* lp = base + std::size_t(line) * row_stride;
        std::int32_t lmax = kNegSentinel;
        for (std::size_t blk = 0; blk < st.blocks; ++blk) {
            std::size_t lo = blk * st.block_len;
            std::size_t hi = lo + st.block_len < st.line_len ? lo + st.block_len : st.line_len;
            std::int32_t bmax = kNegSentinel, bmin = -kNegSentinel;
            for (std::size_t pos = lo; pos < hi; ++pos) {
                std::uint64_t bits = detail::f64_bits(lp[pos * pos_stride]);
                if (detail::raw_exp_field(bits) == 0x7ff) {
                    exceptional = true;
                    continue;
                }
                if ((bits << 1) == 0) continue;  // +/-0 carries no exponent
                std::int32_t e = detail::effective_exponent_bits(bits);
                if (e > bmax) bmax = e;
                if (e < bmin) bmin = e;
            }
            if (bmax != kNegSentinel) {
                st.max_exp[std::size_t(line) * st.blocks + blk] = bmax;
                st.min_exp[std::size_t(line) * st.blocks + blk] = bmin;
                if (bmax > lmax) lmax = bmax;
            }
        }
        st.line_max[std::size_t(line)] = lmax;
    }
    if (exceptional) throw std::domain_error("block_exponent_stats: Inf or NaN input");
    return st;
}

}  // namespace ozadp
