#include <doctest.h>

#include <cmath>
#include <cstdint>

#include "ozadp/grading.hpp"
#include "ozadp/matrix.hpp"
#include "ozadp/oracle.hpp"
#include "ozadp/qr.hpp"

using namespace ozadp;

namespace {

AdpConfig emulating_config() {
    AdpConfig cfg;
    cfg.min_dim = 8;  // let the small trailing products emulate too
    return cfg;
}

AdpConfig native_config() {
    AdpConfig cfg;
    cfg.mode = AdpMode::ForceNative;
    return cfg;
}

std::size_t emulated_count(const std::vector<AdpTrace>& traces) {
    std::size_t c = 0;
    for (const AdpTrace& tr : traces)
        if (tr.decision.path == AdpPath::Emulated) ++c;
    return c;
}

}  // namespace

TEST_CASE("identity input factors to R = I with zero reflectors") {
    const MatrixF64 eye = MatrixF64::identity(32);
    const QrResult qr = geqrf_blocked(eye, 8);
    CHECK(qr.t_blocks.size() == 4);
    CHECK(qr.traces.size() == 12);
    CHECK(bitwise_equal(qr.factors, eye));
    for (const MatrixF64& t : qr.t_blocks)
        for (std::size_t i = 0; i < t.size(); ++i) CHECK(t.data()[i] == 0.0);
    const QrAccuracy acc = qr_residual(eye, qr);
    CHECK(acc.residual == 0.0);
    CHECK(acc.orthogonality == 0.0);
    CHECK(bitwise_equal(materialize_q(qr), eye));
    CHECK(bitwise_equal(upper_r(qr), eye));
}

TEST_CASE("single negative entry flips through the sign reflector") {
    MatrixF64 a(1, 1);
    a(0, 0) = -3.0;
    const QrResult qr = geqrf_blocked(a, 4);
    CHECK(qr.factors(0, 0) == 3.0);
    const MatrixF64 q = materialize_q(qr);
    CHECK(q(0, 0) == -1.0);
    const QrAccuracy acc = qr_residual(a, qr);
    CHECK(acc.residual == 0.0);
    CHECK(acc.orthogonality == 0.0);
}

TEST_CASE("zero columns pass through with a zero R diagonal") {
    MatrixF64 a = gen_uniform_rect(8, 3, 5, -1.0, 1.0);
    for (std::size_t r = 0; r < 8; ++r) a(r, 1) = 0.0;
    const QrResult qr = geqrf_blocked(a, 2);
    CHECK(qr.factors(1, 1) == 0.0);
    const QrAccuracy acc = qr_residual(a, qr);
    CHECK(acc.residual <= 100.0 * 8.0 * 0x1p-52);
}

TEST_CASE("native and emulated runs agree to within the residual bound") {
    const MatrixF64 a = gen_uniform_rect(64, 64, 99, -1.0, 1.0);
    const QrResult nat = geqrf_blocked(a, 16, native_config());
    const QrResult emu = geqrf_blocked(a, 16, emulating_config());

    const QrAccuracy acc_nat = qr_residual(a, nat);
    const QrAccuracy acc_emu = qr_residual(a, emu);
    const double bound = 100.0 * 64.0 * 0x1p-52;
    CHECK(acc_nat.residual > 0.0);
    CHECK(acc_nat.residual <= bound);
    CHECK(acc_emu.residual <= bound);
    CHECK(acc_nat.orthogonality <= bound);
    CHECK(acc_emu.orthogonality <= bound);
    CHECK(acc_emu.residual / acc_nat.residual >= 0.1);
    CHECK(acc_emu.residual / acc_nat.residual <= 10.0);

    // The emulated run actually emulated its large trailing products.
    CHECK(emulated_count(emu.traces) >= 6);
    CHECK(emulated_count(nat.traces) == 0);

    // R diagonals are nonnegative under both configs.
    for (std::size_t i = 0; i < 64; ++i) {
        CHECK(nat.factors(i, i) >= 0.0);
        CHECK(emu.factors(i, i) >= 0.0);
    }
}

TEST_CASE("trace bookkeeping covers three dispatches per panel, ragged tail included") {
    const MatrixF64 a = gen_uniform_rect(100, 40, 17, 0.0, 1.0);
    const QrResult qr = geqrf_blocked(a, 12, emulating_config());
    CHECK(qr.t_blocks.size() == 4);  // panels of width 12, 12, 12, 4
    CHECK(qr.traces.size() == 12);
    CHECK(qr.t_blocks[0].rows() == 12);
    CHECK(qr.t_blocks[3].rows() == 4);
    // The last panel has no trailing columns; its three dispatches see n = 0
    // and fall back as too small.
    for (std::size_t i = 9; i < 12; ++i) {
        CHECK(qr.traces[i].n == 0);
        CHECK(qr.traces[i].decision.path == AdpPath::NativeFallback);
        CHECK(qr.traces[i].decision.reason == AdpReason::TooSmall);
    }
    const QrAccuracy acc = qr_residual(a, qr);
    CHECK(acc.residual <= 100.0 * 100.0 * 0x1p-52);
    CHECK(acc.orthogonality <= 100.0 * 100.0 * 0x1p-52);
}

TEST_CASE("small problems under the size gate fall back everywhere") {
    const MatrixF64 a = gen_uniform_rect(128, 128, 23, -2.0, 2.0);
    AdpConfig gate;
    gate.min_dim = 256;
    const QrResult qr = geqrf_blocked(a, 32, gate);
    CHECK(qr.traces.size() == 12);
    for (const AdpTrace& tr : qr.traces) CHECK(tr.decision.path == AdpPath::NativeFallback);
    CHECK(histogram_csv(qr.traces) == "slices,count\nnative_fallback,12\n");

    // With every product on the native path the factors match a forced
    // native run bitwise.
    const QrResult nat = geqrf_blocked(a, 32, native_config());
    CHECK(bitwise_equal(qr.factors, nat.factors));
}

TEST_CASE("histogram counts emulated slice usage") {
    const MatrixF64 a = gen_uniform_rect(96, 96, 7, 0.0, 1.0);
    const QrResult qr = geqrf_blocked(a, 16, emulating_config());
    const std::string csv = histogram_csv(qr.traces);
    CHECK(csv.rfind("slices,count\n", 0) == 0);
    CHECK(csv.find("native_fallback,") != std::string::npos);
    // Reconstruct the total from the rows.
    std::size_t total = 0;
    std::size_t pos = csv.find('\n') + 1;
    while (pos < csv.size()) {
        const std::size_t comma = csv.find(',', pos);
        const std::size_t eol = csv.find('\n', pos);
        total += std::size_t(std::stoull(csv.substr(comma + 1, eol - comma - 1)));
        pos = eol + 1;
    }
    CHECK(total == qr.traces.size());
    CHECK(emulated_count(qr.traces) > 0);
}

TEST_CASE("dimension violations throw") {
    CHECK_THROWS_AS((void)geqrf_blocked(MatrixF64(3, 5), 2), std::invalid_argument);
    CHECK_THROWS_AS((void)geqrf_blocked(MatrixF64(3, 0), 2), std::invalid_argument);
    CHECK_THROWS_AS((void)geqrf_blocked(MatrixF64(3, 3), 0), std::invalid_argument);
    const QrResult qr = geqrf_blocked(MatrixF64::identity(4), 2);
    CHECK_THROWS_AS((void)qr_residual(MatrixF64(5, 4), qr), std::invalid_argument);
}

TEST_CASE("degenerate empty-edge products survive forced emulation") {
    AdpConfig force;
    force.mode = AdpMode::ForceEmulate;
    force.forced_slices = 7;
    const MatrixF64 a = gen_uniform_rect(8, 8, 1, 1.0, 2.0);
    const MatrixF64 empty_cols(8, 0);
    auto [c1, t1] = adp_gemm(a, empty_cols, 1.0, 0.0, nullptr, force);
    CHECK(c1.rows() == 8);
    CHECK(c1.cols() == 0);
    CHECK(t1.decision.path == AdpPath::Emulated);

    const MatrixF64 empty_rows(0, 8);
    auto [c2, t2] = adp_gemm(empty_rows, a, 1.0, 0.0, nullptr, force);
    CHECK(c2.rows() == 0);
    CHECK(c2.cols() == 8);
    CHECK(t2.decision.path == AdpPath::Emulated);
}
