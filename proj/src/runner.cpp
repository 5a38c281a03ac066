#include "latcode/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

namespace latcode {

namespace {

std::vector<std::string> split_names(const std::string& joined) {
    std::vector<std::string> names;
    std::string item;
    std::istringstream in(joined);
    while (std::getline(in, item, ',')) {
        if (!item.empty()) names.push_back(item);
    }
    if (names.empty()) throw std::invalid_argument("no decoder names given");
    return names;
}

std::string describe_code(const NestedCode& code) {
    std::ostringstream out;
    out << "lattice = " << code.lattice().name() << ", n = " << code.dimension()
        << ", rate = " << format_number(code.rate()) << ", shaping_scale = "
        << code.shaping_scale() << ", power_per_dim = " << format_number(code.power_per_dim());
    return out.str();
}

std::vector<std::string> base_comments(const ExperimentConfig& cfg, const NestedCode& code) {
    std::vector<std::string> comments;
    comments.push_back(describe_code(code));
    std::ostringstream snr;
    snr << "snr_db = " << format_number(cfg.snr.start_db) << " : "
        << format_number(cfg.snr.step_db) << " : " << format_number(cfg.snr.stop_db);
    comments.push_back(snr.str());
    return comments;
}

}  // namespace

std::vector<double> SnrSweep::values() const {
    if (!(step_db > 0.0)) throw std::invalid_argument("SnrSweep: step must be positive");
    if (stop_db < start_db) throw std::invalid_argument("SnrSweep: stop must be >= start");
    const auto count = static_cast<std::size_t>(std::floor((stop_db - start_db) / step_db + 1e-9)) + 1;
    std::vector<double> out(count);
    for (std::size_t k = 0; k < count; ++k) out[k] = start_db + static_cast<double>(k) * step_db;
    return out;
}

std::string format_number(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", value);
    return buf;
}

void write_csv(const Table& table, std::ostream& out) {
    for (const auto& line : table.comments) out << "# " << line << "\n";
    for (std::size_t c = 0; c < table.columns.size(); ++c) {
        if (c) out << ",";
        out << table.columns[c];
    }
    out << "\n";
    for (const auto& row : table.rows) {
        if (row.size() != table.columns.size()) {
            throw std::logic_error("write_csv: row width does not match header");
        }
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out << ",";
            out << format_number(row[c]);
        }
        out << "\n";
    }
}

void write_csv_file(const Table& table, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open output file: " + path);
    write_csv(table, out);
}

NestedCode make_code(const ExperimentConfig& cfg) {
    LatticeSpec lattice = cfg.lattice_file.empty()
                              ? LatticeSpec::builtin(cfg.lattice, cfg.dimension)
                              : LatticeSpec::from_file(cfg.lattice_file);
    return NestedCode::from_rate(lattice, cfg.rate);
}

double resolve_radius(const ExperimentConfig& cfg, const LatticeSpec& lattice) {
    if (cfg.radius_mode == "covering") return lattice.covering_radius();
    if (cfg.radius_mode == "effective") return lattice.effective_radius();
    if (cfg.radius_mode == "value") {
        if (!(cfg.radius_value > 0.0)) {
            throw std::invalid_argument("radius_mode=value requires a positive radius_value");
        }
        return cfg.radius_value;
    }
    throw std::invalid_argument("unknown radius_mode '" + cfg.radius_mode +
                                "' (expected covering, effective, or value)");
}

std::vector<DecoderSpec> parse_decoders(const ExperimentConfig& cfg) {
    std::vector<DecoderSpec> specs;
    for (const auto& name : split_names(cfg.decoders)) {
        DecoderSpec spec;
        spec.kind = decoder_kind_from_name(name);
        spec.grid = cfg.grid;
        spec.crc = cfg.crc;
        spec.crc_alphas = cfg.crc_alphas;
        specs.push_back(spec);
    }
    return specs;
}

Table run_bound_sweep(const ExperimentConfig& cfg) {
    const NestedCode code = make_code(cfg);
    const double radius = resolve_radius(cfg, code.lattice());
    const double r_eff = code.lattice().effective_radius();
    const double power = code.power_per_dim();
    const int n = code.dimension();

    Table table;
    table.comments = base_comments(cfg, code);
    {
        std::ostringstream line;
        line << "radius_mode = " << cfg.radius_mode << ", radius = " << format_number(radius)
             << ", effective_radius = " << format_number(r_eff);
        table.comments.push_back(line.str());
    }
    table.columns = {"snr_db", "sigma2", "covering_lb", "effective_est", "asymptote", "tarokh_lb"};
    for (double snr_db : cfg.snr.values()) {
        const ChannelParams ch = ChannelParams::from_snr_db(power, snr_db);
        const BoundQuery covering_q{n, radius, power, ch.sigma2};
        const BoundQuery effective_q{n, r_eff, power, ch.sigma2};
        table.rows.push_back({snr_db, ch.sigma2, covering_bound(covering_q).value,
                              effective_estimate(effective_q).value,
                              asymptotic_bound(n, radius, ch.sigma2).value,
                              tarokh_bound(n, r_eff, ch.sigma2).value});
    }
    return table;
}

Table run_bound_power_sweep(int dimension, double radius, double sigma2,
                            const std::vector<double>& powers) {
    Table table;
    {
        std::ostringstream line;
        line << "n = " << dimension << ", radius = " << format_number(radius)
             << ", sigma2 = " << format_number(sigma2);
        table.comments.push_back(line.str());
    }
    table.columns = {"power_per_dim", "covering_lb", "asymptote", "rel_gap"};
    const double asym = asymptotic_bound(dimension, radius, sigma2).value;
    for (double power : powers) {
        const BoundQuery q{dimension, radius, power, sigma2};
        const double value = covering_bound(q).value;
        table.rows.push_back({power, value, asym, std::abs(value - asym) / asym});
    }
    return table;
}

Table run_simulation(const ExperimentConfig& cfg) {
    const NestedCode code = make_code(cfg);
    const std::vector<DecoderSpec> specs = parse_decoders(cfg);
    const double power = code.power_per_dim();

    Table table;
    table.comments = base_comments(cfg, code);
    {
        std::ostringstream line;
        line << "decoders = " << cfg.decoders << ", max_trials = " << cfg.max_trials
             << ", max_errors = " << cfg.max_errors << ", seed = " << cfg.seed;
        table.comments.push_back(line.str());
    }
    for (const auto& spec : specs) {
        if (spec.kind == DecoderKind::Genie) {
            std::ostringstream line;
            line << "alpha_grid = " << format_number(cfg.grid.min) << " : "
                 << format_number(cfg.grid.step) << " : " << format_number(cfg.grid.max)
                 << ", include_mmse = " << (cfg.grid.include_mmse ? "true" : "false");
            table.comments.push_back(line.str());
            break;
        }
    }

    table.columns = {"snr_db", "sigma2"};
    for (const auto& spec : specs) {
        const std::string suffix = decoder_kind_name(spec.kind);
        table.columns.push_back("wer_" + suffix);
        table.columns.push_back("ci95_" + suffix);
        table.columns.push_back("errors_" + suffix);
        table.columns.push_back("trials_" + suffix);
        table.columns.push_back("mean_attempts_" + suffix);
    }

    for (double snr_db : cfg.snr.values()) {
        const ChannelParams ch = ChannelParams::from_snr_db(power, snr_db);
        std::vector<double> row{snr_db, ch.sigma2};
        for (const auto& spec : specs) {
            const WerEstimate est =
                estimate_wer(code, ch, spec, cfg.max_trials, cfg.max_errors, cfg.seed, cfg.threads);
            row.push_back(est.wer);
            row.push_back(est.ci95);
            row.push_back(static_cast<double>(est.errors));
            row.push_back(static_cast<double>(est.trials));
            row.push_back(est.mean_attempts);
        }
        table.rows.push_back(row);
    }
    return table;
}

Table run_compare(const ExperimentConfig& cfg) {
    Table bounds = run_bound_sweep(cfg);
    Table sim = run_simulation(cfg);
    if (bounds.rows.size() != sim.rows.size()) {
        throw std::logic_error("run_compare: bound and simulation grids disagree");
    }

    Table table;
    table.comments = bounds.comments;
    for (const auto& line : sim.comments) {
        if (line != bounds.comments.front() && line != bounds.comments[1]) {
            table.comments.push_back(line);
        }
    }
    table.columns = bounds.columns;
    for (std::size_t c = 2; c < sim.columns.size(); ++c) table.columns.push_back(sim.columns[c]);

    const std::vector<DecoderSpec> specs = parse_decoders(cfg);
    for (const auto& spec : specs) {
        table.columns.push_back(std::string("ratio_") + decoder_kind_name(spec.kind) +
                                "_covering");
    }

    for (std::size_t i = 0; i < bounds.rows.size(); ++i) {
        std::vector<double> row = bounds.rows[i];
        const double covering = row[2];
        row.insert(row.end(), sim.rows[i].begin() + 2, sim.rows[i].end());
        for (std::size_t d = 0; d < specs.size(); ++d) {
            const double wer = sim.rows[i][2 + 5 * d];
            row.push_back(covering > 0.0 ? wer / covering
                                         : std::numeric_limits<double>::quiet_NaN());
        }
        table.rows.push_back(row);
    }
    return table;
}

}  // namespace latcode
