#include "ozadp/qr.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "ozadp/oracle.hpp"

namespace ozadp {

namespace {

// Scaled column norm of f[row0:m, col].
double column_norm(const MatrixF64& f, std::size_t row0, std::size_t col) {
    double amax = 0.0;
    for (std::size_t r = row0; r < f.rows(); ++r) amax = std::max(amax, std::fabs(f(r, col)));
    if (amax == 0.0) return 0.0;
    double ss = 0.0;
    for (std::size_t r = row0; r < f.rows(); ++r) {
        const double t = f(r, col) / amax;
        ss += t * t;
    }
    return amax * std::sqrt(ss);
}

// Householder reflector for f[c:m, c], overwriting the column: beta (the new
// nonnegative R diagonal) lands on the diagonal, the normalized tail below.
// Returns tau; H = I - tau * v v^T with v = (1, tail).
double make_reflector(MatrixF64& f, std::size_t c) {
    const double x0 = f(c, c);
    double tail_ss = 0.0;
    for (std::size_t r = c + 1; r < f.rows(); ++r) tail_ss += f(r, c) * f(r, c);

    if (tail_ss == 0.0) {
        // Already along e1. Nonnegative x0 needs no reflection; negative x0
        // flips sign with H = I - 2 e1 e1^T.
        if (x0 >= 0.0) return 0.0;
        f(c, c) = -x0;
        return 2.0;
    }

    const double beta = column_norm(f, c, c);
    // x0 - beta cancels when x0 > 0; the equivalent -tail_ss / (x0 + beta)
    // does not.
    const double v0 = x0 > 0.0 ? -tail_ss / (x0 + beta) : x0 - beta;
    for (std::size_t r = c + 1; r < f.rows(); ++r) f(r, c) /= v0;
    f(c, c) = beta;
    return (beta - x0) / beta;
}

// Applies H = I - tau v v^T (v packed below f(c,c), unit head) to
// f[c:m, col].
void apply_reflector(MatrixF64& f, std::size_t c, double tau, std::size_t col) {
    if (tau == 0.0) return;
    double dot = f(c, col);
    for (std::size_t r = c + 1; r < f.rows(); ++r) dot += f(r, c) * f(r, col);
    const double w = tau * dot;
    f(c, col) -= w;
    for (std::size_t r = c + 1; r < f.rows(); ++r) f(r, col) -= w * f(r, c);
}

// Dense Y of the panel at p0: (m - p0) x pw, unit diagonal, reflector tails
// below.
MatrixF64 build_y(const MatrixF64& f, std::size_t p0, std::size_t pw) {
    MatrixF64 y(f.rows() - p0, pw);
    for (std::size_t j = 0; j < pw; ++j) {
        y(j, j) = 1.0;
        for (std::size_t r = p0 + j + 1; r < f.rows(); ++r) y(r - p0, j) = f(r, p0 + j);
    }
    return y;
}

// Forward accumulation of the panel's T: T(j,j) = tau_j and
// T(0:j, j) = -tau_j * T(0:j, 0:j) * (Y^T y_j).
MatrixF64 build_t(const MatrixF64& y, const std::vector<double>& tau) {
    const std::size_t pw = tau.size();
    MatrixF64 t(pw, pw);
    for (std::size_t j = 0; j < pw; ++j) {
        t(j, j) = tau[j];
        if (j == 0) continue;
        std::vector<double> z(j, 0.0);
        for (std::size_t i = 0; i < j; ++i) {
            double dot = 0.0;
            for (std::size_t r = j; r < y.rows(); ++r) dot += y(r, i) * y(r, j);
            z[i] = dot;
        }
        for (std::size_t i = 0; i < j; ++i) {
            double dot = 0.0;
            for (std::size_t l = i; l < j; ++l) dot += t(i, l) * z[l];
            t(i, j) = -tau[j] * dot;
        }
    }
    return t;
}

}  // namespace

QrResult geqrf_blocked(const MatrixF64& a, std::size_t panel, const AdpConfig& gemm_config) {
    const std::size_t m = a.rows(), n = a.cols();
    require(n >= 1, "geqrf_blocked: empty matrix");
    require(m >= n, "geqrf_blocked: need m >= n");
    require(panel >= 1, "geqrf_blocked: panel width must be positive");
    gemm_config.validate();

    QrResult qr;
    qr.panel = panel;
    qr.factors = a;
    MatrixF64& f = qr.factors;

    for (std::size_t p0 = 0; p0 < n; p0 += panel) {
        const std::size_t pw = std::min(panel, n - p0);
        std::vector<double> tau(pw);
        for (std::size_t j = 0; j < pw; ++j) {
            const std::size_t c = p0 + j;
            tau[j] = make_reflector(f, c);
            for (std::size_t col = c + 1; col < p0 + pw; ++col)
                apply_reflector(f, c, tau[j], col);
        }

        const MatrixF64 y = build_y(f, p0, pw);
        MatrixF64 t = build_t(y, tau);

        // Trailing update A_s -= Y T^T Y^T A_s, all three products
        // dispatched, including the empty tail of the last panel.
        const std::size_t nt = n - p0 - pw;
        MatrixF64 a_s(m - p0, nt);
        for (std::size_t r = 0; r < a_s.rows(); ++r)
            for (std::size_t cc = 0; cc < nt; ++cc) a_s(r, cc) = f(p0 + r, p0 + pw + cc);

        auto [w1, tr1] = adp_gemm(transpose(y), a_s, 1.0, 0.0, nullptr, gemm_config);
        auto [w2, tr2] = adp_gemm(transpose(t), w1, 1.0, 0.0, nullptr, gemm_config);
        auto [updated, tr3] = adp_gemm(y, w2, -1.0, 1.0, &a_s, gemm_config);
        qr.traces.push_back(std::move(tr1));
        qr.traces.push_back(std::move(tr2));
        qr.traces.push_back(std::move(tr3));

        for (std::size_t r = 0; r < updated.rows(); ++r)
            for (std::size_t cc = 0; cc < nt; ++cc) f(p0 + r, p0 + pw + cc) = updated(r, cc);

        qr.t_blocks.push_back(std::move(t));
    }
    return qr;
}

MatrixF64 materialize_q(const QrResult& qr) {
    const std::size_t m = qr.factors.rows(), n = qr.factors.cols();
    MatrixF64 q(m, n);
    for (std::size_t i = 0; i < n; ++i) q(i, i) = 1.0;

    // Q = (I - Y_1 T_1 Y_1^T) ... (I - Y_K T_K Y_K^T) applied to thin I,
    // rightmost block first.
    const std::size_t panels = qr.t_blocks.size();
    for (std::size_t p = panels; p-- > 0;) {
        const std::size_t p0 = p * qr.panel;
        const std::size_t pw = qr.t_blocks[p].rows();
        const MatrixF64 y = build_y(qr.factors, p0, pw);

        MatrixF64 q_sub(m - p0, n);
        for (std::size_t r = 0; r < q_sub.rows(); ++r)
            for (std::size_t c = 0; c < n; ++c) q_sub(r, c) = q(p0 + r, c);

        const MatrixF64 x1 = native_gemm(transpose(y), q_sub);
        const MatrixF64 x2 = native_gemm(qr.t_blocks[p], x1);
        const MatrixF64 upd = native_gemm(y, x2, -1.0, 1.0, &q_sub);
        for (std::size_t r = 0; r < upd.rows(); ++r)
            for (std::size_t c = 0; c < n; ++c) q(p0 + r, c) = upd(r, c);
    }
    return q;
}

MatrixF64 upper_r(const QrResult& qr) {
    const std::size_t n = qr.factors.cols();
    MatrixF64 r(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) r(i, j) = qr.factors(i, j);
    return r;
}

QrAccuracy qr_residual(const MatrixF64& a0, const QrResult& qr) {
    require(a0.rows() == qr.factors.rows() && a0.cols() == qr.factors.cols(),
            "qr_residual: shape mismatch");
    const MatrixF64 q = materialize_q(qr);
    const MatrixF64 r = upper_r(qr);
    const MatrixF64 prod = native_gemm(q, r);

    MatrixF64 diff = a0;
    for (std::size_t i = 0; i < diff.size(); ++i) diff.data()[i] -= prod.data()[i];
    const double a_norm = frobenius_norm(a0);

    MatrixF64 gram = native_gemm(transpose(q), q);
    for (std::size_t i = 0; i < gram.rows(); ++i) gram(i, i) -= 1.0;

    QrAccuracy acc;
    acc.residual = a_norm == 0.0 ? frobenius_norm(diff) : frobenius_norm(diff) / a_norm;
    acc.orthogonality = frobenius_norm(gram);
    return acc;
}

std::string histogram_csv(const std::vector<AdpTrace>& traces) {
    std::map<int, std::size_t> by_slices;
    std::size_t fallbacks = 0;
    for (const AdpTrace& tr : traces) {
        if (tr.decision.path == AdpPath::Emulated)
            ++by_slices[tr.decision.slices];
        else
            ++fallbacks;
    }
    std::string out = "slices,count\n";
    for (const auto& [slices, count] : by_slices) {
        out += std::to_string(slices);
        out += ',';
        out += std::to_string(count);
        out += '\n';
    }
    out += "native_fallback," + std::to_string(fallbacks) + '\n';
    return out;
}

}  // namespace ozadp
