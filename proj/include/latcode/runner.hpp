// runner.hpp -- experiment orchestration: bound sweeps, Monte-Carlo WER
// sweeps, and joined comparisons, emitted as CSV tables.
//
// Output is deterministic for a fixed configuration: numbers are printed
// with %.12g, the config echo contains no timestamps or machine facts (the
// worker count is deliberately excluded), and WER estimation itself is
// worker-count independent.

#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "latcode/bounds.hpp"
#include "latcode/channel.hpp"
#include "latcode/nested_code.hpp"

namespace latcode {

struct SnrSweep {
    double start_db = 16.0;
    double stop_db = 20.0;
    double step_db = 0.25;

    // Inclusive of both endpoints (1e-9 slack on the last step).
    std::vector<double> values() const;
};

struct ExperimentConfig {
    std::string lattice = "e8";  // zn | a2 | dn | e8 | bw16 (file overrides)
    int dimension = 8;           // used by zn / dn
    std::string lattice_file;    // custom generator file; overrides `lattice`
    double rate = 2.0;           // bits per dimension

    // Radius driving the covering-style bounds: the lattice covering
    // radius, its effective radius, or an explicit value.
    std::string radius_mode = "covering";  // covering | effective | value
    double radius_value = 0.0;

    SnrSweep snr;

    std::string decoders = "mmse,genie";  // comma-separated decoder names
    AlphaGrid grid;                       // genie candidates
    CrcScheme crc;
    std::vector<double> crc_alphas;

    std::uint64_t max_trials = 200000;
    std::uint64_t max_errors = 100;
    std::uint64_t seed = 1;
    unsigned threads = 0;  // 0 = hardware concurrency
};

struct Table {
    std::vector<std::string> comments;  // emitted as leading '# ...' lines
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

std::string format_number(double value);  // %.12g
void write_csv(const Table& table, std::ostream& out);
void write_csv_file(const Table& table, const std::string& path);

NestedCode make_code(const ExperimentConfig& cfg);
double resolve_radius(const ExperimentConfig& cfg, const LatticeSpec& lattice);
std::vector<DecoderSpec> parse_decoders(const ExperimentConfig& cfg);

// Columns: snr_db, sigma2, covering_lb, effective_est, asymptote, tarokh_lb.
Table run_bound_sweep(const ExperimentConfig& cfg);

// Fixed noise and radius, growing signal power; shows the covering-style
// bound converging to its large-power asymptote.
// Columns: power_per_dim, covering_lb, asymptote, rel_gap.
Table run_bound_power_sweep(int dimension, double radius, double sigma2,
                            const std::vector<double>& powers);

// Columns: snr_db, sigma2, then wer/ci95/errors/trials/mean_attempts per
// decoder (suffixed _<decoder>). All decoders share per-trial noise at each
// SNR point (same seed), which pairs the estimates.
Table run_simulation(const ExperimentConfig& cfg);

// Bound sweep joined with simulation on the same SNR grid, plus
// ratio_<decoder>_covering = wer / covering_lb columns.
Table run_compare(const ExperimentConfig& cfg);

}  // namespace latcode
