#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace ozadp {

// Dense row-major FP64 matrix.
class MatrixF64 {
public:
    MatrixF64() = default;

    MatrixF64(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    static MatrixF64 identity(std::size_t n) {
        MatrixF64 m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    std::size_t size() const { return data_.size(); }

    double* data() { return data_.data(); }
    const double* data() const { return data_.data(); }

    double* row_ptr(std::size_t i) { return data_.data() + i * cols_; }
    const double* row_ptr(std::size_t i) const { return data_.data() + i * cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

inline MatrixF64 transpose(const MatrixF64& m) {
    MatrixF64 t(m.cols(), m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) t(j, i) = m(i, j);
    return t;
}

inline MatrixF64 abs_matrix(const MatrixF64& m) {
    MatrixF64 r(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.size(); ++i) r.data()[i] = std::fabs(m.data()[i]);
    return r;
}

// Equality of the underlying bit patterns; distinguishes -0.0 from +0.0 and
// compares NaN payloads, unlike operator== on double.
inline bool bitwise_equal(const MatrixF64& a, const MatrixF64& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    return std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

inline double frobenius_norm(const MatrixF64& m) {
    double s = 0.0;
    for (std::size_t i = 0; i < m.size(); ++i) s += m.data()[i] * m.data()[i];
    return std::sqrt(s);
}

inline void require(bool cond, const char* what) {
    if (!cond) throw std::invalid_argument(what);
}

}  // namespace ozadp
