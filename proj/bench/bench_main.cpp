// Throughput comparison between the OpenMP kernels and the serial reference
// implementations that the tests hold them against. Both sides must produce
// bitwise identical output, so the table doubles as a parity spot check.

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdint>
#include <cstdio>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ozadp/grading.hpp"
#include "ozadp/igemm.hpp"
#include "ozadp/matrix.hpp"
#include "ozadp/oracle.hpp"
#include "ozadp/ref_kernels.hpp"
#include "ozadp/slicing.hpp"
#include "ozadp/threads.hpp"

using namespace ozadp;

namespace {

template <class F>
double best_ms(int reps, F&& body) {
    body();  // warmup
    double best = 1e300;
    for (int r = 0; r < reps; ++r) {
        const auto t0 = std::chrono::steady_clock::now();
        body();
        const auto t1 = std::chrono::steady_clock::now();
        best = std::min(best, std::chrono::duration<double, std::milli>(t1 - t0).count());
    }
    return best;
}

void print_row(const std::string& name, std::size_t n, int slices, double serial_ms,
               double parallel_ms, bool bitwise) {
    std::printf("%-22s %6zu %7d %12.3f %12.3f %9.2fx %s\n", name.c_str(), n, slices, serial_ms,
                parallel_ms, serial_ms / parallel_ms, bitwise ? "bitwise-equal" : "MISMATCH");
}

bool same_bits(const MatrixF64& a, const MatrixF64& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (std::bit_cast<std::uint64_t>(a.data()[i]) != std::bit_cast<std::uint64_t>(b.data()[i]))
            return false;
    return true;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_env();

    CLI::App app{"serial reference vs OpenMP kernel throughput"};
    std::vector<std::size_t> sizes{256, 512};
    int reps = 3;
    int slices = 7;
    int threads = 0;
    app.add_option("--sizes", sizes, "square dimensions to time")->delimiter(',');
    app.add_option("--reps", reps, "timed repetitions (best-of)");
    app.add_option("--slices", slices, "slice count for the integer kernels");
    app.add_option("--threads", threads, "cap the OpenMP worker count");
    CLI11_PARSE(app, argc, argv);
    if (threads > 0) set_thread_cap(threads);

    std::printf("%-22s %6s %7s %12s %12s %9s %s\n", "kernel", "n", "slices", "serial ms",
                "parallel ms", "speedup", "check");

    for (const std::size_t n : sizes) {
        const MatrixF64 a = gen_uniform(n, 42, 1.0, 2.0);
        const MatrixF64 b = gen_uniform(n, 43, 1.0, 2.0);

        MatrixF64 fp_par, fp_ser;
        const double fp_pms = best_ms(reps, [&] { fp_par = native_gemm(a, b); });
        const double fp_sms = best_ms(reps, [&] { fp_ser = ref_gemm_serial(a, b); });
        print_row("fp64 gemm", n, 0, fp_sms, fp_pms, same_bits(fp_par, fp_ser));

        GemmParams params;
        params.slices = slices;
        const SlicedMatrix sa = decompose(a, Orientation::ByRow, slices);
        const SlicedMatrix sb = decompose(b, Orientation::ByCol, slices);
        DiagonalAccumulators acc_par, acc_ser;
        const double ig_pms = best_ms(reps, [&] { acc_par = slice_pair_mm(sa, sb, params); });
        const double ig_sms = best_ms(reps, [&] { acc_ser = ref_slice_pair_mm(sa, sb, params); });
        const bool ig_same = acc_par.acc == acc_ser.acc;
        std::printf("%-22s %6zu %7d %12.3f %12.3f %9.2fx %s\n", "int8 slice contraction", n,
                    slices, ig_sms, ig_pms, ig_sms / ig_pms,
                    ig_same ? "bitwise-equal" : "MISMATCH");

        MatrixF64 em_par, em_ser;
        const double em_pms = best_ms(reps, [&] { em_par = emulated_gemm(a, b, params); });
        const double em_sms = best_ms(reps, [&] { em_ser = ref_emulated_gemm(a, b, params); });
        print_row("emulated gemm", n, slices, em_sms, em_pms, same_bits(em_par, em_ser));
    }
    return 0;
}
