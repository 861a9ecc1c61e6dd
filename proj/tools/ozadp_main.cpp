#include <charconv>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ozadp/adp.hpp"
#include "ozadp/esc.hpp"
#include "ozadp/grading.hpp"
#include "ozadp/matrix.hpp"
#include "ozadp/matrix_io.hpp"
#include "ozadp/qr.hpp"
#include "ozadp/selftest.hpp"
#include "ozadp/threads.hpp"

using namespace ozadp;

namespace {

// Operands are file paths, or idN for the N x N identity.
MatrixF64 load_operand(const std::string& operand) {
    if (operand.size() > 2 && operand.compare(0, 2, "id") == 0 &&
        operand.find_first_not_of("0123456789", 2) == std::string::npos)
        return MatrixF64::identity(std::stoul(operand.substr(2)));
    return read_matrix(operand);
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path + " for writing");
    f << content;
    f.flush();
    if (!f) throw std::runtime_error("write failed: " + path);
}

void write_csv_file(const std::string& path, const std::vector<SweepRow>& rows) {
    std::string out = std::string(csv_header()) + "\n";
    for (const SweepRow& row : rows) {
        out += to_csv(row);
        out += '\n';
    }
    write_text_file(path, out);
}

std::string fmt(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

// Tuning flags shared by every dispatching subcommand.
struct AdpFlags {
    int target_bits = 53;
    std::size_t esc_block = 256;
    int max_slices = 18;
    std::size_t min_dim = 256;

    void attach(CLI::App* cmd) {
        cmd->add_option("--target-bits", target_bits, "mantissa bits the result must carry");
        cmd->add_option("--esc-block", esc_block, "ESC coarsening block length");
        cmd->add_option("--max-slices", max_slices, "largest slice count before fallback");
        cmd->add_option("--min-dim", min_dim, "smallest dimension worth emulating");
    }

    AdpConfig config() const {
        AdpConfig cfg;
        cfg.target_bits = target_bits;
        cfg.esc_block_len = esc_block;
        cfg.max_slices = max_slices;
        cfg.min_dim = min_dim;
        return cfg;
    }
};

// Mode strings are usage, not library contract: report bad ones as exit 2.
bool apply_mode_or_complain(const std::string& mode, AdpConfig& cfg) {
    if (parse_mode(mode, cfg)) return true;
    std::cerr << "error: bad mode '" << mode << "' (expected auto, native or emulate:S)\n";
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    apply_thread_env();

    CLI::App app{"FP64 matrix multiply emulated on 8-bit integer slices, with accuracy guardrails"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "cap the OpenMP worker count (overrides OZADP_THREADS)");

    auto* gemm = app.add_subcommand("gemm", "multiply two matrix files through the dispatcher");
    std::string g_a, g_b, g_c, g_out, g_trace, g_mode = "auto";
    double g_alpha = 1.0, g_beta = 0.0;
    AdpFlags g_flags;
    gemm->add_option("--a", g_a, "left operand (file or idN)")->required();
    gemm->add_option("--b", g_b, "right operand (file or idN)")->required();
    gemm->add_option("--c", g_c, "accumulator operand for beta != 0 (file or idN)");
    gemm->add_option("--alpha", g_alpha, "scale on A*B");
    gemm->add_option("--beta", g_beta, "scale on C");
    gemm->add_option("--mode", g_mode, "auto, native, or emulate:S");
    gemm->add_option("--out", g_out, "output matrix file")->required();
    gemm->add_option("--trace", g_trace, "write the dispatch trace JSON here");
    g_flags.attach(gemm);

    auto* esc_cmd = app.add_subcommand("esc", "print the exponent span estimate for a pair");
    std::string e_a, e_b;
    bool e_exact = false;
    int e_target = 53;
    std::size_t e_block = 256;
    esc_cmd->add_option("--a", e_a, "left operand (file or idN)")->required();
    esc_cmd->add_option("--b", e_b, "right operand (file or idN)")->required();
    esc_cmd->add_flag("--exact", e_exact, "exhaustive per-pair span instead of the coarse bound");
    esc_cmd->add_option("--esc-block", e_block, "coarsening block length");
    esc_cmd->add_option("--target-bits", e_target, "mantissa bits the result must carry");

    auto* grade = app.add_subcommand("grade", "accuracy sweeps");
    grade->require_subcommand(1);

    auto* gt2 = grade->add_subcommand("test2", "exponent-span sweep at fixed n");
    std::size_t t2_n = 1024;
    std::vector<int> t2_blist;
    std::vector<std::string> t2_modes;
    std::uint64_t t2_seed = 0;
    std::string t2_csv;
    AdpFlags t2_flags;
    gt2->add_option("--n", t2_n, "matrix dimension")->required();
    gt2->add_option("--b-list", t2_blist, "exponent half-span values")->required()->delimiter(',');
    gt2->add_option("--modes", t2_modes, "dispatch modes to sweep")->required()->delimiter(',');
    gt2->add_option("--seed", t2_seed, "PRNG seed");
    gt2->add_option("--csv", t2_csv, "output CSV path")->required();
    t2_flags.attach(gt2);

    auto* gu = grade->add_subcommand("uniform", "uniform(0,1) grading sweep over sizes");
    std::vector<std::size_t> u_nlist;
    std::uint64_t u_seed = 0;
    std::string u_csv;
    AdpFlags u_flags;
    u_flags.min_dim = 8;  // let every sweep size emulate by default
    gu->add_option("--n-list", u_nlist, "matrix dimensions")->required()->delimiter(',');
    gu->add_option("--seed", u_seed, "PRNG seed");
    gu->add_option("--csv", u_csv, "output CSV path")->required();
    u_flags.attach(gu);

    auto* qr_cmd = app.add_subcommand("qr", "blocked Householder QR with dispatched updates");
    std::size_t q_m = 0, q_n = 0, q_panel = 32;
    std::string q_mode = "auto", q_csv;
    std::uint64_t q_seed = 0;
    AdpFlags q_flags;
    qr_cmd->add_option("--m", q_m, "rows")->required();
    qr_cmd->add_option("--n", q_n, "columns")->required();
    qr_cmd->add_option("--panel", q_panel, "panel width");
    qr_cmd->add_option("--mode", q_mode, "auto, native, or emulate:S");
    qr_cmd->add_option("--seed", q_seed, "PRNG seed for the uniform test matrix");
    qr_cmd->add_option("--csv", q_csv, "slice histogram CSV path")->required();
    q_flags.attach(qr_cmd);

    auto* st = app.add_subcommand("selftest", "run the curated property checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (threads > 0) set_thread_cap(threads);

    try {
        if (gemm->parsed()) {
            AdpConfig cfg = g_flags.config();
            if (!apply_mode_or_complain(g_mode, cfg)) return 2;
            const MatrixF64 a = load_operand(g_a);
            const MatrixF64 b = load_operand(g_b);
            MatrixF64 cm;
            const MatrixF64* cptr = nullptr;
            if (!g_c.empty()) {
                cm = load_operand(g_c);
                cptr = &cm;
            }
            auto [out, trace] = adp_gemm(a, b, g_alpha, g_beta, cptr, cfg);
            write_matrix(g_out, out);
            if (!g_trace.empty()) write_text_file(g_trace, trace.to_json() + "\n");
            return 0;
        }
        if (esc_cmd->parsed()) {
            const MatrixF64 a = load_operand(e_a);
            const MatrixF64 b = load_operand(e_b);
            const EscReport rep =
                e_exact ? esc_exact(a, b, e_target)
                        : esc_coarsened(block_exponent_stats(a, Orientation::ByRow, e_block),
                                        block_exponent_stats(b, Orientation::ByCol, e_block),
                                        e_target);
            std::cout << "esc_bits=" << rep.esc_bits << " slices=" << rep.slices_required
                      << '\n';
            return 0;
        }
        if (gt2->parsed()) {
            AdpConfig probe = t2_flags.config();
            for (const std::string& mode : t2_modes)
                if (!apply_mode_or_complain(mode, probe)) return 2;
            const std::vector<SweepRow> rows =
                run_test2_sweep(t2_n, t2_blist, t2_modes, t2_seed, t2_flags.config());
            write_csv_file(t2_csv, rows);
            return 0;
        }
        if (gu->parsed()) {
            const UniformGradeResult res = run_uniform_grade(u_nlist, u_seed, u_flags.config());
            write_csv_file(u_csv, res.rows);
            std::cout << "grade_a=" << (res.report.grade_a_pass ? "PASS" : "FAIL")
                      << " c=" << fmt(res.report.c_calibrated)
                      << " slope_max=" << fmt(res.report.slope_max)
                      << " slope_avg=" << fmt(res.report.slope_avg)
                      << " native_slope_avg=" << fmt(res.report.native_slope_avg) << '\n';
            return 0;
        }
        if (qr_cmd->parsed()) {
            AdpConfig cfg = q_flags.config();
            if (!apply_mode_or_complain(q_mode, cfg)) return 2;
            const MatrixF64 a = gen_uniform_rect(q_m, q_n, q_seed);
            const QrResult qr = geqrf_blocked(a, q_panel, cfg);
            const QrAccuracy acc = qr_residual(a, qr);
            write_text_file(q_csv, histogram_csv(qr.traces));
            std::cout << "residual=" << fmt(acc.residual)
                      << " orthogonality=" << fmt(acc.orthogonality)
                      << " panels=" << qr.t_blocks.size() << " traces=" << qr.traces.size()
                      << '\n';
            return 0;
        }
        if (st->parsed()) return selftest(std::cout) ? 0 : 4;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 0;
}
