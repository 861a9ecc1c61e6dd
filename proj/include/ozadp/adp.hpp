#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "ozadp/esc.hpp"
#include "ozadp/fpbits.hpp"
#include "ozadp/matrix.hpp"

namespace ozadp {

enum class AdpMode : std::uint8_t { Auto, ForceEmulate, ForceNative };

struct AdpConfig {
    int target_bits = 53;            // mantissa bits the result must honor
    std::size_t esc_block_len = 256; // block length for the coarsened span scan
    int max_slices = 18;             // emulation refused above this slice count
    std::size_t min_dim = 256;       // below this, emulation overhead dominates
    AdpMode mode = AdpMode::Auto;
    int forced_slices = 7;           // slice count used by ForceEmulate
    // Modeled integer-MMA : FP64 throughput ratio. Emulation runs s^2 integer
    // products per FP64 product, so it pays off once s^2/cost_ratio plus the
    // relative scan cost drops below 1. The default admits every slice count
    // up to max_slices on large problems.
    double cost_ratio = 512.0;
    std::size_t chunk_len = 65536;   // forwarded to the integer kernels

    void validate() const;
};

enum class AdpPath : std::uint8_t { Emulated, NativeFallback };

enum class AdpReason : std::uint8_t {
    Ok,                // emulation chosen by the heuristic chain
    Forced,            // mode override decided the path
    ExceptionalValues, // NaN or Inf present; only native IEEE semantics apply
    EscTooLarge,       // required slices exceed max_slices
    TooSmall,          // problem below min_dim
    CostModel          // modeled emulation cost at or above native cost
};

const char* to_string(AdpPath path);
const char* to_string(AdpReason reason);

struct AdpDecision {
    AdpPath path = AdpPath::NativeFallback;
    AdpReason reason = AdpReason::Ok;
    int slices = 0;  // valid when path == Emulated
    std::optional<EscReport> esc;
    double modeled_cost_ratio = 0.0;  // emulated/native cost; 0 when never modeled
};

struct AdpTrace {
    AdpDecision decision;
    ScanReport scan_a;
    ScanReport scan_b;
    std::size_t m = 0, n = 0, k = 0;

    // One JSON object with the stable keys path, reason, esc_bits, slices,
    // m, n, k. esc_bits and slices are null when the pipeline never got far
    // enough to compute them.
    std::string to_json() const;
};

// Pure dispatch: exceptional scan result first (ESC must never run on
// exceptional data), then size gate, then span capacity, then the cost
// model. esc_provider is only invoked when the chain reaches step three.
AdpDecision decide(const ScanReport& scan_a, const ScanReport& scan_b, std::size_t m,
                   std::size_t n, std::size_t k,
                   const std::function<EscReport()>& esc_provider, const AdpConfig& config);

// Applies a mode string to a config: "auto", "native", or "emulate:S" with
// S a slice count. Returns false (config untouched) on malformed input.
bool parse_mode(const std::string& text, AdpConfig& config);

// GEMM entry point: scan, decide, dispatch to the integer pipeline or to
// native FP64, and report what happened. The fallback path is the plain
// native_gemm call, so its output is bitwise identical to calling that
// directly. alpha/beta/C follow the BLAS convention (beta == 0 ignores C).
std::pair<MatrixF64, AdpTrace> adp_gemm(const MatrixF64& a, const MatrixF64& b,
                                        double alpha = 1.0, double beta = 0.0,
                                        const MatrixF64* c = nullptr,
                                        const AdpConfig& config = AdpConfig{});

}  // namespace ozadp
