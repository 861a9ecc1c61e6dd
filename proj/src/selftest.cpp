#include "ozadp/selftest.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "ozadp/adp.hpp"
#include "ozadp/esc.hpp"
#include "ozadp/grading.hpp"
#include "ozadp/igemm.hpp"
#include "ozadp/matrix.hpp"
#include "ozadp/matrix_io.hpp"
#include "ozadp/oracle.hpp"
#include "ozadp/qr.hpp"
#include "ozadp/ref_kernels.hpp"
#include "ozadp/rng.hpp"
#include "ozadp/slicing.hpp"

namespace ozadp {

namespace {

constexpr double k32Eps = 32.0 * 0x1p-52;

MatrixF64 signed_span(std::mt19937_64& rng, std::size_t r, std::size_t c, int span) {
    MatrixF64 m(r, c);
    for (std::size_t i = 0; i < m.size(); ++i) {
        double v = std::ldexp(1.0 + double(rng() >> 12) * 0x1p-52,
                              int(rng() % std::uint64_t(span + 1)) - span / 2);
        m.data()[i] = (rng() & 1) ? -v : v;
    }
    return m;
}

bool check_saturated_equals_exact() {
    std::mt19937_64 rng(1);
    for (int rep = 0; rep < 20; ++rep) {
        const MatrixF64 a = signed_span(rng, 4, 8, 60);
        const MatrixF64 b = signed_span(rng, 8, 4, 60);
        GemmParams params;
        params.slices = 18;
        if (!bitwise_equal(emulated_gemm(a, b, params), exact_gemm(a, b))) return false;
    }
    return true;
}

bool check_esc_safety() {
    std::mt19937_64 rng(2);
    for (int rep = 0; rep < 20; ++rep) {
        const int span = int(rng() % 60);
        const MatrixF64 a = signed_span(rng, 24, 32, span);
        const MatrixF64 b = signed_span(rng, 32, 24, span);
        const EscReport exact = esc_exact(a, b, 53);
        for (std::size_t block : {std::size_t{4}, std::size_t{32}}) {
            const EscReport coarse = esc_coarsened(block_exponent_stats(a, Orientation::ByRow, block),
                                                   block_exponent_stats(b, Orientation::ByCol, block),
                                                   53);
            if (coarse.esc_bits < exact.esc_bits) return false;
            if (coarse.slices_required < exact.slices_required) return false;
        }
    }
    return true;
}

bool check_slice_arithmetic() {
    return required_slices(53, 0) == 7 && required_slices(53, 1) == 7 &&
           required_slices(53, 2) == 8 && required_slices(53, 33) == 11 &&
           required_slices(53, 89) == 18;
}

bool check_chunk_invariance() {
    std::mt19937_64 rng(3);
    const MatrixF64 a = signed_span(rng, 16, 40, 24);
    const MatrixF64 b = signed_span(rng, 40, 16, 24);
    GemmParams p1, p2;
    p1.slices = p2.slices = 11;
    p1.chunk_len = 1;
    p2.chunk_len = 65536;
    return bitwise_equal(emulated_gemm(a, b, p1), emulated_gemm(a, b, p2));
}

bool check_default_dispatch() {
    const MatrixF64 a = gen_uniform(256, 10, 1.0, 2.0);
    const MatrixF64 b = gen_uniform(256, 11, 1.0, 2.0);
    auto [c, trace] = adp_gemm(a, b);
    if (trace.decision.path != AdpPath::Emulated) return false;
    if (trace.decision.slices != 7) return false;
    const MatrixF64 nat = native_gemm(a, b);
    const ErrorReport rep = error_report(c, nat);
    return rep.max_err <= k32Eps;
}

bool check_exceptional_fallback() {
    MatrixF64 a = gen_uniform(32, 12);
    MatrixF64 b = gen_uniform(32, 13);
    a(3, 7) = std::numeric_limits<double>::quiet_NaN();
    AdpConfig cfg;
    cfg.min_dim = 8;
    auto [c, trace] = adp_gemm(a, b, 1.0, 0.0, nullptr, cfg);
    return trace.decision.path == AdpPath::NativeFallback &&
           trace.decision.reason == AdpReason::ExceptionalValues &&
           bitwise_equal(c, native_gemm(a, b));
}

bool check_test2_identity() {
    const Test2Instance inst = gen_test2(128, 8, 5);
    const double xtx = exact_dot(inst.x, inst.x).rounded;
    AdpConfig cfg;
    cfg.min_dim = 8;
    auto [c, trace] = adp_gemm(inst.lhs, inst.rhs, 1.0, 0.0, nullptr, cfg);
    if (trace.decision.path != AdpPath::Emulated) return false;
    for (std::size_t i = 0; i < 128; ++i)
        if (c(i, i) != xtx) return false;
    const ErrorReport rep = error_report(c, native_gemm(inst.lhs, inst.rhs), xtx);
    return rep.max_err <= k32Eps;
}

bool check_qr() {
    const MatrixF64 a = gen_uniform_rect(64, 48, 21, -1.0, 1.0);
    AdpConfig cfg;
    cfg.min_dim = 8;
    const QrResult qr = geqrf_blocked(a, 16, cfg);
    if (qr.traces.size() != 9) return false;
    const QrAccuracy acc = qr_residual(a, qr);
    const double bound = 100.0 * 64.0 * 0x1p-52;
    return acc.residual <= bound && acc.orthogonality <= bound;
}

bool check_io_roundtrip() {
    std::mt19937_64 rng(6);
    MatrixF64 m(5, 3);
    for (std::size_t i = 0; i < m.size(); ++i) m.data()[i] = std::bit_cast<double>(rng());
    m(0, 0) = -0.0;
    std::stringstream bin(std::ios::in | std::ios::out | std::ios::binary);
    write_adpm(bin, m);
    if (!bitwise_equal(read_adpm(bin), m)) return false;

    const MatrixF64 finite = gen_uniform(6, 7, -3.0, 3.0);
    std::stringstream text;
    write_matrix_market(text, finite);
    return bitwise_equal(read_matrix_market(text), finite);
}

bool check_ref_parity() {
    std::mt19937_64 rng(8);
    const MatrixF64 a = signed_span(rng, 32, 32, 16);
    const MatrixF64 b = signed_span(rng, 32, 32, 16);
    if (!bitwise_equal(ref_gemm_serial(a, b), native_gemm(a, b))) return false;
    GemmParams params;
    params.slices = 8;
    return bitwise_equal(ref_emulated_gemm(a, b, params), emulated_gemm(a, b, params));
}

}  // namespace

bool selftest(std::ostream& os) {
    struct Check {
        const char* name;
        std::function<bool()> run;
    };
    const Check checks[] = {
        {"saturated slicing equals the exact oracle", check_saturated_equals_exact},
        {"coarsened ESC never underestimates", check_esc_safety},
        {"slice requirement arithmetic", check_slice_arithmetic},
        {"chunk length does not change results", check_chunk_invariance},
        {"default dispatch emulates with 7 slices", check_default_dispatch},
        {"exceptional values fall back bitwise", check_exceptional_fallback},
        {"exponent-span diagonal identity", check_test2_identity},
        {"blocked QR residual bound", check_qr},
        {"matrix file round-trips", check_io_roundtrip},
        {"serial reference kernel parity", check_ref_parity},
    };
    bool all_ok = true;
    for (const Check& check : checks) {
        bool ok = false;
        std::string note;
        try {
            ok = check.run();
        } catch (const std::exception& e) {
            note = std::string(" (") + e.what() + ")";
        }
        os << (ok ? "ok   " : "FAIL ") << check.name << note << '\n';
        all_ok = all_ok && ok;
    }
    os << (all_ok ? "selftest passed" : "selftest FAILED") << '\n';
    return all_ok;
}

}  // namespace ozadp
