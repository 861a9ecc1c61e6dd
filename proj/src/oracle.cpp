#include "ozadp/oracle.hpp"

#include <string>

namespace ozadp {

MatrixF64 native_gemm(const MatrixF64& a, const MatrixF64& b, double alpha, double beta,
                      const MatrixF64* c) {
    require(a.cols() == b.rows(), "native_gemm: inner dimensions differ");
    if (beta != 0.0) {
        require(c != nullptr, "native_gemm: beta != 0 needs C");
        require(c->rows() == a.rows() && c->cols() == b.cols(), "native_gemm: C shape mismatch");
    }
    const std::size_t m = a.rows(), n = b.cols(), k = a.cols();
    MatrixF64 out(m, n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(m); ++i) {
        const double* arow = a.row_ptr(std::size_t(i));
        for (std::size_t j = 0; j < n; ++j) {
            double sum = 0.0;
            for (std::size_t l = 0; l < k; ++l) sum = sum + arow[l] * b(l, j);
            double r = alpha * sum;
            if (beta != 0.0) r = r + beta * (*c)(std::size_t(i), j);
            out(std::size_t(i), j) = r;
        }
    }
    return out;
}

namespace {

void check_finite(const MatrixF64& m, const char* who) {
    for (std::size_t i = 0; i < m.size(); ++i)
        if (detail::raw_exp_field(detail::f64_bits(m.data()[i])) == 0x7ff)
            throw std::domain_error(std::string(who) + ": Inf or NaN input");
}

}  // namespace

ExactDot exact_dot(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size(), "exact_dot: length mismatch");
    Superaccumulator acc;
    for (std::size_t l = 0; l < x.size(); ++l) {
        if (detail::raw_exp_field(detail::f64_bits(x[l])) == 0x7ff ||
            detail::raw_exp_field(detail::f64_bits(y[l])) == 0x7ff)
            throw std::domain_error("exact_dot: Inf or NaN input");
        acc.add_product(x[l], y[l]);
    }
    ExactDot r;
    r.exact = acc.to_exact();
    r.rounded = acc.to_double();
    return r;
}

MatrixF64 exact_gemm(const MatrixF64& a, const MatrixF64& b) {
    require(a.cols() == b.rows(), "exact_gemm: inner dimensions differ");
    check_finite(a, "exact_gemm");
    check_finite(b, "exact_gemm");
    const std::size_t m = a.rows(), n = b.cols(), k = a.cols();
    // Column-major copy of B so the inner loop streams both operands.
    MatrixF64 bt = transpose(b);
    MatrixF64 out(m, n);
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < std::int64_t(m); ++i) {
        const double* arow = a.row_ptr(std::size_t(i));
        Superaccumulator acc;
        for (std::size_t j = 0; j < n; ++j) {
            const double* bcol = bt.row_ptr(j);
            acc.clear();
            for (std::size_t l = 0; l < k; ++l) acc.add_product(arow[l], bcol[l]);
            out(std::size_t(i), j) = acc.to_double();
        }
    }
    return out;
}

}  // namespace ozadp
