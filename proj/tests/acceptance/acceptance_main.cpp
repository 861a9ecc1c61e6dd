// Acceptance gate: one line per criterion, PASS only when the measured
// property holds AND the run fits the time budget. Exit 0 iff all pass.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <numeric>
#include <string>
#include <vector>

#include "ozadp/adp.hpp"
#include "ozadp/esc.hpp"
#include "ozadp/grading.hpp"
#include "ozadp/igemm.hpp"
#include "ozadp/matrix.hpp"
#include "ozadp/oracle.hpp"
#include "ozadp/qr.hpp"
#include "ozadp/rng.hpp"
#include "ozadp/slicing.hpp"
#include "ozadp/threads.hpp"

using namespace ozadp;

namespace {

constexpr double kEps = 0x1p-52;
constexpr double k32Eps = 32.0 * kEps;

struct Outcome {
    bool pass = false;
    std::string detail;
};

std::string fmt(const char* f, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

int failures = 0;

void run_criterion(int idx, const char* name, double budget_s,
                   const std::function<Outcome()>& body) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
        out = body();
    } catch (const std::exception& e) {
        out.pass = false;
        out.detail = std::string("exception: ") + e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_budget = secs < budget_s;
    const bool pass = out.pass && in_budget;
    if (!pass) ++failures;
    std::printf("[%d] %-28s %s  %s%s  (%.1fs / %.0fs)\n", idx, name, pass ? "PASS" : "FAIL",
                out.detail.c_str(), in_budget ? "" : " [over budget]", secs, budget_s);
    std::fflush(stdout);
}

double rand_fp64_finite(Xoshiro256pp& rng) {
    for (;;) {
        const std::uint64_t bits = rng();
        if (((bits >> 52) & 0x7ff) == 0x7ff) continue;  // no Inf/NaN
        return std::bit_cast<double>(bits);
    }
}

// Value with a 52-bit random mantissa and an exponent uniform in [elo, ehi].
double rand_in_span(Xoshiro256pp& rng, int elo, int ehi) {
    const double mant = 1.0 + double(rng() >> 12) * 0x1p-52;
    const int e = elo + int(rng() % std::uint64_t(ehi - elo + 1));
    const double v = std::ldexp(mant, e);
    return (rng() & 1) ? -v : v;
}

bool same_bits(const MatrixF64& a, const MatrixF64& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a.data()[i]) != std::bit_cast<std::uint64_t>(b.data()[i]))
            return false;
    return true;
}

// ---------------------------------------------------------------- criterion 1

// Round-trip is exact as a value; -0.0 legitimately comes back as +0.0.
bool roundtrip_exact(double in, double out) {
    if (in == 0.0 && out == 0.0) return true;
    return std::bit_cast<std::uint64_t>(in) == std::bit_cast<std::uint64_t>(out);
}

Outcome criterion_encoding() {
    Xoshiro256pp rng(0xC1);
    // Random finite values, one per line, so every line has zero span.
    const std::size_t n_random = 1'000'000;
    MatrixF64 col(n_random, 1);
    for (std::size_t i = 0; i < n_random; ++i) col(i, 0) = rand_fp64_finite(rng);
    const MatrixF64 back = reconstruct(decompose(col, Orientation::ByRow, 7));
    std::size_t bad_random = 0;
    for (std::size_t i = 0; i < n_random; ++i)
        if (!roundtrip_exact(col(i, 0), back(i, 0))) ++bad_random;

    // Near-carry patterns: mantissas at the wrap boundaries across the
    // exponent range, including denormals.
    const std::uint64_t mants[] = {0xFFFFFFFFFFFFFull, 0xFFFFFFFFFFFFEull, 0x8000000000000ull,
                                   0x0000000000001ull, 0x5555555555555ull, 0xAAAAAAAAAAAAAull,
                                   0x0000000000000ull};
    const std::uint64_t exps[] = {0, 1, 2, 512, 1022, 1023, 1024, 2045, 2046};
    std::vector<double> adversarial;
    for (std::uint64_t e : exps)
        for (std::uint64_t m : mants)
            for (std::uint64_t s : {0ull, 1ull})
                adversarial.push_back(std::bit_cast<double>((s << 63) | (e << 52) | m));
    MatrixF64 adv(adversarial.size(), 1);
    for (std::size_t i = 0; i < adversarial.size(); ++i) adv(i, 0) = adversarial[i];
    const MatrixF64 adv_back = reconstruct(decompose(adv, Orientation::ByRow, 7));
    std::size_t bad_adv = 0;
    for (std::size_t i = 0; i < adversarial.size(); ++i)
        if (!roundtrip_exact(adv(i, 0), adv_back(i, 0))) ++bad_adv;

    // Remap: value preservation checked in exact integer arithmetic, byte
    // preservation against the unique carry-adjusted unsigned digit chain.
    const std::size_t n_chains = 200'000;
    std::size_t bad_remap = 0;
    for (std::size_t t = 0; t < n_chains; ++t) {
        DigitChain chain;
        chain.lead = int(rng() % 255) - 128;  // full accepted domain [-128, 126]
        chain.sub.resize(rng() % 9);
        for (auto& d : chain.sub) d = std::uint8_t(rng());
        const std::vector<std::int8_t> out = remap_digits(chain);
        const std::size_t len = chain.sub.size();
        bool ok = out.size() == len + 1;
        if (ok) {
            __int128 want = chain.lead, got = out[0];
            for (std::size_t i = 0; i < len; ++i) {
                want = want * 256 + chain.sub[i];
                got = got * 256 + out[i + 1];
            }
            ok = want == got;
            int carry = 0;
            for (std::size_t i = len; i-- > 0;) {
                const int adj = int(chain.sub[i]) + carry;
                carry = adj >= 128 ? 1 : 0;
                if (std::uint8_t(out[i + 1]) != std::uint8_t(adj & 0xFF)) ok = false;
            }
            if (out[0] != chain.lead + carry) ok = false;
        }
        if (!ok) ++bad_remap;
    }

    return {bad_random == 0 && bad_adv == 0 && bad_remap == 0,
            fmt("%zu random + %zu near-carry round-trips (%zu+%zu bad); %zu remaps (%zu bad)",
                n_random, adversarial.size(), bad_random, bad_adv, n_chains, bad_remap)};
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_esc_safety() {
    Xoshiro256pp rng(0xE5C);
    const std::size_t pairs = 10'000;
    const std::size_t blocks[] = {1, 4, 16, 256};
    std::size_t under = 0, unequal_b1 = 0;
    int max_gap = 0;
    for (std::size_t t = 0; t < pairs; ++t) {
        const std::size_t m = 2 + rng() % 15, k = 2 + rng() % 15, n = 2 + rng() % 15;
        const int span = int(rng() % 201);
        const int elo = -span / 2 - int(rng() % 40);
        MatrixF64 a(m, k), b(k, n);
        for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = rand_in_span(rng, elo, elo + span);
        for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] = rand_in_span(rng, elo, elo + span);
        const EscReport exact = esc_exact(a, b, 53);
        for (const std::size_t bl : blocks) {
            const EscReport coarse =
                esc_coarsened(block_exponent_stats(a, Orientation::ByRow, bl),
                              block_exponent_stats(b, Orientation::ByCol, bl), 53);
            if (coarse.esc_bits < exact.esc_bits) ++under;
            if (bl == 1 && coarse.esc_bits != exact.esc_bits) ++unequal_b1;
            max_gap = std::max(max_gap, coarse.esc_bits - exact.esc_bits);
        }
    }
    return {under == 0 && unequal_b1 == 0,
            fmt("%zu pairs x 4 block lengths: %zu underestimates, %zu b=1 inequalities, max "
                "overshoot %d bits",
                pairs, under, unequal_b1, max_gap)};
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_saturation() {
    Xoshiro256pp rng(0x0AC);
    GemmParams params;
    params.slices = 32;
    std::size_t trials = 0, mismatches = 0;
    for (std::size_t m = 1; m <= 4; ++m)
        for (std::size_t n = 1; n <= 4; ++n)
            for (std::size_t k = 1; k <= 8; ++k)
                for (int rep = 0; rep < 8; ++rep) {
                    MatrixF64 a(m, k), b(k, n);
                    for (std::size_t i = 0; i < a.size(); ++i)
                        a.data()[i] = rng() % 10 == 0 ? 0.0 : rand_in_span(rng, -30, 30);
                    for (std::size_t i = 0; i < b.size(); ++i)
                        b.data()[i] = rng() % 10 == 0 ? 0.0 : rand_in_span(rng, -30, 30);
                    ++trials;
                    if (!same_bits(emulated_gemm(a, b, params), exact_gemm(a, b))) ++mismatches;
                }
    return {mismatches == 0,
            fmt("%zu trials over all shapes m,n<=4 k<=8 at s=32: %zu bitwise mismatches", trials,
                mismatches)};
}

// ---------------------------------------------------------------- criterion 4

Outcome criterion_span_sweep() {
    const std::vector<int> b_list{1, 2, 4, 8, 16, 32, 64, 128};
    const std::vector<SweepRow> rows =
        run_test2_sweep(1024, b_list, {"auto", "emulate:7"}, 42);
    double auto_worst = 0.0;
    bool auto_ok = true, low_ok = true, high_ok = true;
    std::string force_blob;
    for (const SweepRow& row : rows) {
        if (row.mode == "auto") {
            auto_worst = std::max(auto_worst, row.max_err);
            if (row.max_err > k32Eps) auto_ok = false;
        } else {
            const int b = *row.b;
            if (b >= 16 && row.max_err <= 1e-6) high_ok = false;
            if (b <= 1 && row.max_err > k32Eps) low_ok = false;
            if (b == 1 || b >= 16) force_blob += fmt(" b%d=%.2e", b, row.max_err);
        }
    }
    return {auto_ok && low_ok && high_ok,
            fmt("auto worst %.2e (<=32eps %s); force7%s (b>=16 must exceed 1e-06: %s, b<=1 "
                "within 32eps: %s)",
                auto_worst, auto_ok ? "ok" : "VIOLATED", force_blob.c_str(),
                high_ok ? "ok" : "VIOLATED", low_ok ? "ok" : "VIOLATED")};
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion_grade_a() {
    AdpConfig cfg;
    cfg.min_dim = 8;  // every sweep size should emulate
    const UniformGradeResult res =
        run_uniform_grade({128, 256, 512, 1024, 2048}, 0x6E4DE, cfg);
    const GradeReport& rep = res.report;
    const bool exponent_ok = rep.slope_avg >= 0.3 && rep.slope_avg <= 0.7;
    std::string pts;
    for (const GradePoint& p : res.points) pts += fmt(" n%zu=%.3g", p.n, p.emu_max_ratio);
    return {rep.eq1_pass && exponent_ok,
            fmt("componentwise bound f(n)<=c*n %s (c=%.3g; max ratios%s); avg-error growth "
                "exponent %.3f target 0.5+-0.2 %s (native %.3f)",
                rep.eq1_pass ? "ok" : "VIOLATED", rep.c_calibrated, pts.c_str(), rep.slope_avg,
                exponent_ok ? "ok" : "VIOLATED", rep.native_slope_avg)};
}

// ---------------------------------------------------------------- criterion 6

Outcome criterion_exceptions() {
    Xoshiro256pp rng(0xE6);
    std::size_t nan_cases = 100, nan_bad = 0, fallback_bad = 0;
    for (std::size_t t = 0; t < nan_cases; ++t) {
        const std::size_t m = 8 + rng() % 40, k = 8 + rng() % 40, n = 8 + rng() % 40;
        MatrixF64 a = gen_uniform_rect(m, k, rng(), 0.0, 1.0);
        MatrixF64 b = gen_uniform_rect(k, n, rng(), 0.0, 1.0);
        const std::size_t injections = 1 + rng() % 4;
        for (std::size_t i = 0; i < injections; ++i) {
            const std::uint64_t special[] = {0x7ff8000000000000ull | (rng() & 0xFFFFFFFFFull),
                                             0xfff8deadbeefcafeull, 0x7ff0000000000000ull,
                                             0xfff0000000000000ull};
            const double v = std::bit_cast<double>(special[rng() % 4]);
            if (rng() & 1)
                a.data()[rng() % a.size()] = v;
            else
                b.data()[rng() % b.size()] = v;
        }
        const auto [out, trace] = adp_gemm(a, b);
        if (trace.decision.path != AdpPath::NativeFallback ||
            trace.decision.reason != AdpReason::ExceptionalValues)
            ++fallback_bad;
        if (!same_bits(out, native_gemm(a, b))) ++nan_bad;
    }

    // Negative zeros are not exceptional: these inputs must still emulate.
    std::size_t nz_cases = 8, nz_notemulated = 0;
    double nz_gamma_max = 0.0;
    bool nz_bounded = true;
    for (std::size_t t = 0; t < nz_cases; ++t) {
        const std::size_t m = 256 + rng() % 33, k = 256 + rng() % 33, n = 256 + rng() % 33;
        MatrixF64 a = gen_uniform_rect(m, k, rng(), 1.0, 2.0);
        MatrixF64 b = gen_uniform_rect(k, n, rng(), 1.0, 2.0);
        for (std::size_t i = 0; i < a.size(); ++i)
            if (rng() % 4 == 0) a.data()[i] = -0.0;
        for (std::size_t i = 0; i < b.size(); ++i)
            if (rng() % 4 == 0) b.data()[i] = -0.0;
        if (t == 0)
            for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = -0.0;  // all -0.0
        const auto [out, trace] = adp_gemm(a, b);
        if (trace.decision.path != AdpPath::Emulated) {
            ++nz_notemulated;
            continue;
        }
        MatrixF64 aa = a, ab = b;
        for (std::size_t i = 0; i < aa.size(); ++i) aa.data()[i] = std::fabs(aa.data()[i]);
        for (std::size_t i = 0; i < ab.size(); ++i) ab.data()[i] = std::fabs(ab.data()[i]);
        const MatrixF64 ref = exact_gemm(a, b);
        const MatrixF64 den = exact_gemm(aa, ab);
        for (std::size_t i = 0; i < ref.size(); ++i) {
            const double diff = std::fabs(out.data()[i] - ref.data()[i]);
            if (diff == 0.0) continue;
            if (den.data()[i] == 0.0) {
                nz_bounded = false;
                continue;
            }
            const double gamma = diff / (kEps * den.data()[i]);
            nz_gamma_max = std::max(nz_gamma_max, gamma);
            if (gamma > double(n)) nz_bounded = false;
        }
    }
    return {nan_bad == 0 && fallback_bad == 0 && nz_notemulated == 0 && nz_bounded,
            fmt("%zu NaN/Inf cases: %zu not bitwise native, %zu wrong path; %zu -0.0 cases: %zu "
                "fell back, gamma max %.3g",
                nan_cases, nan_bad, fallback_bad, nz_cases, nz_notemulated, nz_gamma_max)};
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion_determinism() {
    const int max_threads = thread_cap();
    Xoshiro256pp rng(0xDE7);
    const std::size_t instances = 100;
    std::size_t thread_bad = 0, perm_bad = 0;
    for (std::size_t t = 0; t < instances; ++t) {
        const std::size_t m = 4 + rng() % 37, k = 4 + rng() % 37, n = 4 + rng() % 37;
        GemmParams params;
        params.slices = 2 + int(rng() % 11);
        MatrixF64 a(m, k), b(k, n);
        for (std::size_t i = 0; i < a.size(); ++i) a.data()[i] = rand_in_span(rng, -20, 20);
        for (std::size_t i = 0; i < b.size(); ++i) b.data()[i] = rand_in_span(rng, -20, 20);

        set_thread_cap(1);
        const MatrixF64 r1 = emulated_gemm(a, b, params);
        set_thread_cap(4);
        const MatrixF64 r4 = emulated_gemm(a, b, params);
        set_thread_cap(max_threads);
        const MatrixF64 rmax = emulated_gemm(a, b, params);
        if (!same_bits(r1, r4) || !same_bits(r1, rmax)) ++thread_bad;

        std::vector<std::size_t> perm(k);
        std::iota(perm.begin(), perm.end(), std::size_t{0});
        for (std::size_t i = k; i > 1; --i) std::swap(perm[i - 1], perm[rng() % i]);
        MatrixF64 ap(m, k), bp(k, n);
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t l = 0; l < k; ++l) ap(i, l) = a(i, perm[l]);
        for (std::size_t l = 0; l < k; ++l)
            for (std::size_t j = 0; j < n; ++j) bp(l, j) = b(perm[l], j);
        if (!same_bits(r1, emulated_gemm(ap, bp, params))) ++perm_bad;
    }
    set_thread_cap(max_threads);
    return {thread_bad == 0 && perm_bad == 0,
            fmt("%zu instances: %zu thread-count mismatches over {1,4,%d}, %zu k-permutation "
                "mismatches",
                instances, thread_bad, max_threads, perm_bad)};
}

// ---------------------------------------------------------------- criterion 8

Outcome criterion_qr() {
    const std::size_t sizes[][2] = {{256, 128}, {512, 512}, {1024, 512}};
    bool ok = true;
    std::string blob;
    std::uint64_t seed = 0x9800;
    for (const auto& sz : sizes) {
        const std::size_t m = sz[0], nn = sz[1];
        const MatrixF64 a = gen_uniform_rect(m, nn, seed++, 0.0, 1.0);

        AdpConfig native_cfg;
        native_cfg.mode = AdpMode::ForceNative;
        const QrResult qr_nat = geqrf_blocked(a, 32, native_cfg);
        const double res_nat = qr_residual(a, qr_nat).residual;

        AdpConfig emu_cfg;
        emu_cfg.min_dim = 8;  // panel-width operands must be allowed to emulate
        const QrResult qr_emu = geqrf_blocked(a, 32, emu_cfg);
        const double res_emu = qr_residual(a, qr_emu).residual;

        const double bound = 100.0 * double(std::max(m, nn)) * kEps;
        const std::size_t panels = qr_emu.t_blocks.size();
        const bool traces_ok =
            qr_emu.traces.size() == 3 * panels && qr_nat.traces.size() == 3 * panels;

        std::map<int, std::size_t> hist;
        std::size_t emulated_total = 0;
        for (const AdpTrace& tr : qr_emu.traces)
            if (tr.decision.path == AdpPath::Emulated) {
                ++hist[tr.decision.slices];
                ++emulated_total;
            }
        const bool hist_ok = !hist.empty() && hist.begin()->second * 2 >= emulated_total;

        const bool size_ok = res_emu <= 10.0 * res_nat && res_emu <= bound && res_nat <= bound &&
                             traces_ok && hist_ok;
        ok = ok && size_ok;
        blob += fmt(" %zux%zu: res %.2e vs native %.2e, traces %zu/%zu, min-slice share %zu/%zu%s",
                    m, nn, res_emu, res_nat, qr_emu.traces.size(), 3 * panels,
                    hist.empty() ? 0 : hist.begin()->second, emulated_total,
                    size_ok ? "" : " VIOLATED");
    }
    return {ok, blob.substr(1)};
}

}  // namespace

int main() {
    apply_thread_env();
    std::printf("acceptance: FP64 GEMM emulation on 8-bit integer slices\n");
    run_criterion(1, "encoding fidelity", 10, criterion_encoding);
    run_criterion(2, "span estimate safety", 60, criterion_esc_safety);
    run_criterion(3, "oracle saturation", 60, criterion_saturation);
    run_criterion(4, "exponent-span sweep", 600, criterion_span_sweep);
    run_criterion(5, "grade-A uniform suite", 1200, criterion_grade_a);
    run_criterion(6, "exception semantics", 30, criterion_exceptions);
    run_criterion(7, "determinism", 60, criterion_determinism);
    run_criterion(8, "QR integration", 900, criterion_qr);
    std::printf("acceptance: %d/8 criteria passed\n", 8 - failures);
    return failures == 0 ? 0 : 1;
}
