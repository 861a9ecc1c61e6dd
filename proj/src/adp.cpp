#include "ozadp/adp.hpp"

#include <algorithm>
#include <cassert>
#include <charconv>

#include <json.hpp>

#include "ozadp/igemm.hpp"
#include "ozadp/oracle.hpp"
#include "ozadp/slicing.hpp"

namespace ozadp {

void AdpConfig::validate() const {
    require(target_bits >= 1 && target_bits <= 1024, "AdpConfig: target_bits out of range");
    require(esc_block_len >= 1, "AdpConfig: esc_block_len must be positive");
    require(max_slices >= 7 && max_slices <= int(kMaxSlices),
            "AdpConfig: max_slices must be in [7, 32]");
    require(min_dim >= 1, "AdpConfig: min_dim must be positive");
    require(cost_ratio > 0.0, "AdpConfig: cost_ratio must be positive");
    if (mode == AdpMode::ForceEmulate)
        require(forced_slices >= 1 && forced_slices <= int(kMaxSlices),
                "AdpConfig: forced_slices out of range");
    GemmParams p;
    p.chunk_len = chunk_len;
    p.validate();
}

const char* to_string(AdpPath path) {
    return path == AdpPath::Emulated ? "emulated" : "native_fallback";
}

const char* to_string(AdpReason reason) {
    switch (reason) {
        case AdpReason::Ok: return "ok";
        case AdpReason::Forced: return "forced";
        case AdpReason::ExceptionalValues: return "exceptional_values";
        case AdpReason::EscTooLarge: return "esc_too_large";
        case AdpReason::TooSmall: return "too_small";
        case AdpReason::CostModel: return "cost_model";
    }
    return "?";
}

AdpDecision decide(const ScanReport& scan_a, const ScanReport& scan_b, std::size_t m,
                   std::size_t n, std::size_t k,
                   const std::function<EscReport()>& esc_provider, const AdpConfig& config) {
    config.validate();
    AdpDecision d;
    if (config.mode == AdpMode::ForceNative) {
        d.path = AdpPath::NativeFallback;
        d.reason = AdpReason::Forced;
        return d;
    }
    // The exceptional gate runs before anything that interprets exponents,
    // including for forced emulation: Inf/NaN semantics exist only natively.
    if (scan_a.has_exceptional || scan_b.has_exceptional) {
        d.path = AdpPath::NativeFallback;
        d.reason = AdpReason::ExceptionalValues;
        return d;
    }
    if (config.mode == AdpMode::ForceEmulate) {
        d.path = AdpPath::Emulated;
        d.reason = AdpReason::Forced;
        d.slices = config.forced_slices;
        return d;
    }
    if (std::min({m, n, k}) < config.min_dim) {
        d.path = AdpPath::NativeFallback;
        d.reason = AdpReason::TooSmall;
        return d;
    }
    EscReport esc = esc_provider();
    d.esc = esc;
    if (esc.slices_required > config.max_slices) {
        d.path = AdpPath::NativeFallback;
        d.reason = AdpReason::EscTooLarge;
        return d;
    }
    // Modeled work: s^2 integer products per output element against one FP64
    // product, plus the operand scans the estimator itself already paid.
    double mnk = double(m) * double(n) * double(k);
    double s = double(esc.slices_required);
    double estimator = double(m) * double(k) + double(k) * double(n);
    d.modeled_cost_ratio = (s * s * mnk / config.cost_ratio + estimator) / mnk;
    if (d.modeled_cost_ratio >= 1.0) {
        d.path = AdpPath::NativeFallback;
        d.reason = AdpReason::CostModel;
        return d;
    }
    d.path = AdpPath::Emulated;
    d.reason = AdpReason::Ok;
    d.slices = esc.slices_required;
    return d;
}

std::string AdpTrace::to_json() const {
    nlohmann::json j;
    j["path"] = to_string(decision.path);
    j["reason"] = to_string(decision.reason);
    if (decision.esc)
        j["esc_bits"] = decision.esc->esc_bits;
    else
        j["esc_bits"] = nullptr;
    if (decision.path == AdpPath::Emulated)
        j["slices"] = decision.slices;
    else
        j["slices"] = nullptr;
    j["m"] = m;
    j["n"] = n;
    j["k"] = k;
    return j.dump();
}

bool parse_mode(const std::string& text, AdpConfig& config) {
    if (text == "auto") {
        config.mode = AdpMode::Auto;
        return true;
    }
    if (text == "native") {
        config.mode = AdpMode::ForceNative;
        return true;
    }
    const std::string prefix = "emulate:";
    if (text.size() > prefix.size() && text.compare(0, prefix.size(), prefix) == 0) {
        const char* first = text.data() + prefix.size();
        const char* last = text.data() + text.size();
        int slices = 0;
        auto [ptr, ec] = std::from_chars(first, last, slices);
        if (ec != std::errc{} || ptr != last || slices < 1 || slices > 32) return false;
        config.mode = AdpMode::ForceEmulate;
        config.forced_slices = slices;
        return true;
    }
    return false;
}

std::pair<MatrixF64, AdpTrace> adp_gemm(const MatrixF64& a, const MatrixF64& b, double alpha,
                                        double beta, const MatrixF64* c, const AdpConfig& config) {
    config.validate();
    require(a.cols() == b.rows(), "adp_gemm: inner dimensions differ");
    require(beta == 0.0 || c != nullptr, "adp_gemm: beta != 0 requires C");
    if (c) require(c->rows() == a.rows() && c->cols() == b.cols(), "adp_gemm: C shape mismatch");

    AdpTrace trace;
    trace.m = a.rows();
    trace.n = b.cols();
    trace.k = a.cols();
    // Forced-native calls never inspect the data; everything else is scanned
    // before any O(n^3) work can start.
    if (config.mode != AdpMode::ForceNative) {
        trace.scan_a = scan_matrix(a);
        trace.scan_b = scan_matrix(b);
    }
    auto esc_provider = [&]() {
        BlockStats sa = block_exponent_stats(a, Orientation::ByRow, config.esc_block_len);
        BlockStats sb = block_exponent_stats(b, Orientation::ByCol, config.esc_block_len);
        return esc_coarsened(sa, sb, config.target_bits);
    };
    trace.decision =
        decide(trace.scan_a, trace.scan_b, trace.m, trace.n, trace.k, esc_provider, config);

    MatrixF64 out;
    if (trace.decision.path == AdpPath::Emulated) {
        assert(!trace.scan_a.has_exceptional && !trace.scan_b.has_exceptional);
        GemmParams p;
        p.alpha = alpha;
        p.beta = beta;
        p.slices = trace.decision.slices;
        p.chunk_len = config.chunk_len;
        assert(p.policy.kind == PairPolicy::Kind::Full);
        out = emulated_gemm(a, b, p, c);
    } else {
        out = native_gemm(a, b, alpha, beta, c);
    }
    return {std::move(out), std::move(trace)};
}

}  // namespace ozadp
