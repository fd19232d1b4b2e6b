#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "homsim/config.hpp"
#include "homsim/polarization.hpp"
#include "homsim/table.hpp"

namespace {

using namespace homsim;

struct CommonFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::uint64_t seed_raw = 0;
    std::optional<std::string> out;
    std::optional<std::string> format;
    int threads = 0;
};

void add_common(CLI::App* sub, CommonFlags& flags, bool with_seed, bool with_format) {
    sub->add_option("--config", flags.config_path, "Config file (JSON)")->required();
    sub->add_option("--threads", flags.threads,
                    "Worker threads (0 = all cores; never affects results)");
    if (with_seed) {
        auto* opt = sub->add_option("--seed", flags.seed_raw, "RNG seed (overrides config)");
        sub->callback([&flags, opt] {
            if (opt->count()) flags.seed = flags.seed_raw;
        });
    }
    sub->add_option("--out", flags.out, "Output path (overrides config; default stdout)");
    if (with_format)
        sub->add_option("--format", flags.format, "Output format: csv|jsonl (overrides config)")
            ->check(CLI::IsMember({"csv", "jsonl"}));
}

OutputFormat resolve_format(const CommonFlags& flags, const OutputSpec& spec) {
    if (flags.format) return *flags.format == "jsonl" ? OutputFormat::Jsonl : OutputFormat::Csv;
    if (spec.format) return *spec.format;
    return OutputFormat::Csv;
}

std::optional<std::string> resolve_out(const CommonFlags& flags, const OutputSpec& spec) {
    if (flags.out) return flags.out;
    return spec.path;
}

std::uint64_t resolve_seed(const CommonFlags& flags, const std::optional<std::uint64_t>& cfg) {
    if (flags.seed) return *flags.seed;
    if (cfg) return *cfg;
    throw ConfigError("a seed is required (set --seed or the config 'seed' key)");
}

void emit_table(const Table& table, const CommonFlags& flags, const OutputSpec& spec) {
    const OutputFormat format = resolve_format(flags, spec);
    if (const auto path = resolve_out(flags, spec)) {
        std::ofstream out(*path, std::ios::binary);
        if (!out) throw ConfigError(*path + ": cannot open output file");
        write_table(table, out, format);
    } else {
        write_table(table, std::cout, format);
    }
}

void emit_record(const nlohmann::ordered_json& record, const CommonFlags& flags,
                 const OutputSpec& spec) {
    const std::string text = record.dump(2) + "\n";
    std::cout << text;
    if (const auto path = resolve_out(flags, spec)) {
        std::ofstream out(*path, std::ios::binary);
        if (!out) throw ConfigError(*path + ": cannot open output file");
        out << text;
    }
}

int run_dop_sweep(const CommonFlags& flags) {
    const DopSweepConfig cfg = load_dop_sweep_config(flags.config_path);
    Table table;
    table.columns = {"tau", "tau_c", "dop"};
    const PolarizationState input = PolarizationState::balanced(0.0);
    for (const double tau_c : cfg.tau_c_values) {
        for (const double tau : cfg.tau_values) {
            const DensityMatrix rho =
                apply_time_entanglement_channel(input, TemporalProfile(tau_c, tau));
            table.rows.push_back({Cell::real(tau), Cell::real(tau_c), Cell::real(dop(rho))});
        }
    }
    emit_table(table, flags, cfg.output);
    return 0;
}

int run_fock_run(const CommonFlags& flags) {
    const FockRunConfig cfg = load_fock_run_config(flags.config_path);
    const std::uint64_t seed = resolve_seed(flags, cfg.seed);
    const FockCounts counts = simulate_fock_experiment(cfg.channel, cfg.n_pairs, cfg.detector,
                                                       StreamKey{seed, 0}, flags.threads,
                                                       cfg.input_delta);
    const Verdict verdict =
        single_photon_verdict(counts.coincidences, counts.n_pairs, cfg.detector, cfg.confidence);

    nlohmann::ordered_json record;
    record["command"] = "fock-run";
    record["seed"] = seed;
    record["n_pairs"] = cfg.n_pairs;
    record["channel"] = channel_to_json(cfg.channel);
    record["detector"] = detector_to_json(cfg.detector);
    record["confidence"] = cfg.confidence;
    record["input_delta"] = cfg.input_delta;
    record["counts"] = {{"coincidences", counts.coincidences},
                        {"singles1", counts.singles1},
                        {"singles2", counts.singles2}};
    record["coincidence_rate"] =
        static_cast<double>(counts.coincidences) / static_cast<double>(counts.n_pairs);
    record["verdict"] = verdict_to_json(verdict);
    emit_record(record, flags, cfg.output);
    return 0;
}

int run_visibility_sweep(const CommonFlags& flags) {
    const VisibilitySweepConfig cfg = load_visibility_sweep_config(flags.config_path);
    const std::uint64_t seed = resolve_seed(flags, cfg.seed);
    const auto cells =
        visibility_surface(cfg.mu_values, cfg.alpha0_values, cfg.channel_kind, cfg.pairing,
                           cfg.detector, cfg.n_pairs, StreamKey{seed, 0}, flags.threads,
                           cfg.input_delta);
    Table table;
    table.columns = {"mu", "alpha0", "visibility", "sigma", "n_pairs"};
    for (const auto& cell : cells) {
        std::vector<Cell> row{Cell::real(cell.mu), Cell::real(cell.alpha0)};
        if (cell.est) {
            row.push_back(Cell::real(cell.est->v));
            row.push_back(Cell::real(cell.est->sigma));
        } else {
            row.push_back(Cell::null());
            row.push_back(Cell::null());
        }
        row.push_back(Cell::count(cfg.n_pairs));
        table.rows.push_back(std::move(row));
    }
    emit_table(table, flags, cfg.output);
    return 0;
}

int run_discriminate(const CommonFlags& flags) {
    const DiscriminateConfig cfg = load_discriminate_config(flags.config_path);
    const std::uint64_t seed = resolve_seed(flags, cfg.seed);
    const VisibilityEstimate est =
        run_visibility_experiment(cfg.channel, cfg.mu, cfg.n_pairs, cfg.detector,
                                  StreamKey{seed, 0}, flags.threads, cfg.input_delta);
    const Verdict verdict = coherent_verdict(est, cfg.mu, cfg.detector, cfg.k_sigma);
    const double v_max = model_visibility(cfg.mu, 1.0, cfg.detector);

    nlohmann::ordered_json record;
    record["command"] = "discriminate";
    record["seed"] = seed;
    record["mu"] = cfg.mu;
    record["n_pairs"] = cfg.n_pairs;
    record["channel"] = channel_to_json(cfg.channel);
    record["detector"] = detector_to_json(cfg.detector);
    record["k_sigma"] = cfg.k_sigma;
    record["input_delta"] = cfg.input_delta;
    record["counts"] = {{"channel", est.coincidences_channel},
                        {"reference", est.coincidences_reference}};
    record["visibility"] = est.v;
    record["sigma"] = est.sigma;
    record["epsilon"] = cfg.k_sigma * est.sigma;
    record["v_max"] = v_max;
    record["margin"] = est.v - v_max;
    record["verdict"] = verdict_to_json(verdict);
    emit_record(record, flags, cfg.output);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"HOM-interference discrimination of depolarizing vs fast-rotation channels"};
    app.require_subcommand(1);

    CommonFlags dop_flags, fock_flags, vis_flags, disc_flags;
    auto* dop = app.add_subcommand("dop-sweep", "Degree of polarization vs delay table");
    add_common(dop, dop_flags, /*with_seed=*/false, /*with_format=*/true);
    auto* fock = app.add_subcommand("fock-run", "Single-photon interference run with verdict");
    add_common(fock, fock_flags, true, false);
    auto* vis = app.add_subcommand("visibility-sweep", "Visibility over a (mu, alpha0) grid");
    add_common(vis, vis_flags, true, true);
    auto* disc = app.add_subcommand("discriminate", "Coherent-state visibility run with verdict");
    add_common(disc, disc_flags, true, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (dop->parsed()) return run_dop_sweep(dop_flags);
        if (fock->parsed()) return run_fock_run(fock_flags);
        if (vis->parsed()) return run_visibility_sweep(vis_flags);
        if (disc->parsed()) return run_discriminate(disc_flags);
    } catch (const homsim::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const homsim::EstimationError& e) {
        std::cerr << "estimation impossible: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
