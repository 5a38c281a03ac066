// latsim -- lattice-code bound sweeps, Monte-Carlo WER sweeps, and joined
// comparisons over an AWGN channel. Emits CSV to a file or stdout.

#include <CLI11.hpp>
#include <fstream>
#include <iostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "latcode/runner.hpp"

namespace {

void emit(const latcode::Table& table, const std::string& out_path) {
    if (out_path.empty()) {
        latcode::write_csv(table, std::cout);
    } else {
        latcode::write_csv_file(table, out_path);
        std::cerr << "wrote " << out_path << "\n";
    }
}

void write_sidecar_config(const latcode::Table& table, const std::string& out_path) {
    if (out_path.empty()) return;
    const std::string path = out_path + ".config";
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    for (const auto& line : table.comments) out << line << "\n";
}

void add_code_options(CLI::App* cmd, latcode::ExperimentConfig& cfg) {
    cmd->add_option("--lattice", cfg.lattice, "builtin lattice: zn, a2, dn, e8, bw16")
        ->capture_default_str();
    cmd->add_option("--n", cfg.dimension, "dimension for zn / dn")->capture_default_str();
    cmd->add_option("--lattice-file", cfg.lattice_file,
                    "load a custom generator (first line n, then n rows of n basis-vector "
                    "entries); overrides --lattice");
    cmd->add_option("--rate", cfg.rate, "code rate in bits per dimension")->capture_default_str();
}

void add_snr_options(CLI::App* cmd, latcode::ExperimentConfig& cfg) {
    cmd->add_option("--snr-start", cfg.snr.start_db, "sweep start, dB")->capture_default_str();
    cmd->add_option("--snr-stop", cfg.snr.stop_db, "sweep stop, dB (inclusive)")
        ->capture_default_str();
    cmd->add_option("--snr-step", cfg.snr.step_db, "sweep step, dB")->capture_default_str();
}

void add_radius_options(CLI::App* cmd, latcode::ExperimentConfig& cfg) {
    cmd->add_option("--radius", cfg.radius_mode,
                    "radius for covering-style bounds: covering, effective, or value")
        ->capture_default_str();
    cmd->add_option("--radius-value", cfg.radius_value, "radius when --radius value");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "lattice-code experiments: word-error bounds and Monte-Carlo decoding over AWGN"};
    app.require_subcommand(1);

    latcode::ExperimentConfig cfg;
    std::string out_path;

    // --- bound ---------------------------------------------------------
    auto* bound = app.add_subcommand("bound", "analytic bound sweep over SNR");
    add_code_options(bound, cfg);
    add_snr_options(bound, cfg);
    add_radius_options(bound, cfg);
    bound->add_option("-o,--out", out_path, "output CSV path (default stdout)");

    bool power_sweep = false;
    double power_start = 10.0, power_stop = 1e6, power_factor = 10.0, power_sigma2 = 1.0,
           power_radius = 1.0, power_n = 8;
    bound->add_flag("--power-sweep", power_sweep,
                    "fixed radius and noise, growing power: convergence of the covering-style "
                    "bound to its asymptote (uses --power-* and ignores SNR/code options)");
    bound->add_option("--power-n", power_n, "dimension for --power-sweep")->capture_default_str();
    bound->add_option("--power-radius", power_radius, "radius for --power-sweep")
        ->capture_default_str();
    bound->add_option("--power-sigma2", power_sigma2, "noise variance for --power-sweep")
        ->capture_default_str();
    bound->add_option("--power-start", power_start, "first power per dimension")
        ->capture_default_str();
    bound->add_option("--power-stop", power_stop, "last power per dimension (inclusive)")
        ->capture_default_str();
    bound->add_option("--power-factor", power_factor, "geometric step between powers")
        ->capture_default_str();

    // --- simulate ------------------------------------------------------
    auto* simulate = app.add_subcommand("simulate", "Monte-Carlo WER sweep over SNR");
    add_code_options(simulate, cfg);
    add_snr_options(simulate, cfg);
    simulate->add_option("--decoder", cfg.decoders,
                         "comma-separated decoders: alpha1, mmse, genie, crc_retry")
        ->capture_default_str();
    simulate->add_option("--alpha-min", cfg.grid.min, "genie grid lower edge")
        ->capture_default_str();
    simulate->add_option("--alpha-max", cfg.grid.max, "genie grid upper edge")
        ->capture_default_str();
    simulate->add_option("--alpha-step", cfg.grid.step, "genie grid step")->capture_default_str();
    simulate
        ->add_option("--force-include-mmse", cfg.grid.include_mmse,
                     "prepend the MMSE coefficient to the genie grid")
        ->capture_default_str();
    simulate->add_option("--crc-bits", cfg.crc.parity_bits, "CRC parity bits for crc_retry")
        ->capture_default_str();
    simulate->add_option("--crc-alpha", cfg.crc_alphas,
                         "explicit crc_retry candidates (repeatable; default "
                         "mmse, 1.0, midpoint)");
    simulate->add_option("--trials", cfg.max_trials, "trial cap per SNR point")
        ->capture_default_str();
    simulate->add_option("--max-errors", cfg.max_errors, "stop a point after this many errors")
        ->capture_default_str();
    simulate->add_option("--seed", cfg.seed, "base RNG seed")->capture_default_str();
    simulate->add_option("--threads", cfg.threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    simulate->add_option("-o,--out", out_path, "output CSV path (default stdout)");

    // --- compare -------------------------------------------------------
    auto* compare =
        app.add_subcommand("compare", "bound sweep joined with a simulation on one grid");
    add_code_options(compare, cfg);
    add_snr_options(compare, cfg);
    add_radius_options(compare, cfg);
    compare->add_option("--decoder", cfg.decoders, "comma-separated decoders")
        ->capture_default_str();
    compare->add_option("--alpha-min", cfg.grid.min, "genie grid lower edge")
        ->capture_default_str();
    compare->add_option("--alpha-max", cfg.grid.max, "genie grid upper edge")
        ->capture_default_str();
    compare->add_option("--alpha-step", cfg.grid.step, "genie grid step")->capture_default_str();
    compare->add_option("--trials", cfg.max_trials, "trial cap per SNR point")
        ->capture_default_str();
    compare->add_option("--max-errors", cfg.max_errors, "stop a point after this many errors")
        ->capture_default_str();
    compare->add_option("--seed", cfg.seed, "base RNG seed")->capture_default_str();
    compare->add_option("--threads", cfg.threads, "worker threads (0 = hardware)")
        ->capture_default_str();
    compare->add_option("-o,--out", out_path, "output CSV path (default stdout)");

    CLI11_PARSE(app, argc, argv);

    try {
        if (bound->parsed()) {
            if (power_sweep) {
                std::vector<double> powers;
                for (double p = power_start; p <= power_stop * (1.0 + 1e-12); p *= power_factor) {
                    powers.push_back(p);
                }
                emit(latcode::run_bound_power_sweep(static_cast<int>(power_n), power_radius,
                                                    power_sigma2, powers),
                     out_path);
            } else {
                emit(latcode::run_bound_sweep(cfg), out_path);
            }
        } else if (simulate->parsed()) {
            const latcode::Table table = latcode::run_simulation(cfg);
            emit(table, out_path);
            write_sidecar_config(table, out_path);
        } else if (compare->parsed()) {
            emit(latcode::run_compare(cfg), out_path);
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
