#ifndef HOMSIM_CONFIG_HPP
#define HOMSIM_CONFIG_HPP

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "homsim/coherent.hpp"
#include "homsim/discriminator.hpp"
#include "homsim/fock.hpp"
#include "homsim/table.hpp"

namespace homsim {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct OutputSpec {
    std::optional<std::string> path;
    std::optional<OutputFormat> format;
};

struct DopSweepConfig {
    std::vector<double> tau_values;
    std::vector<double> tau_c_values;
    OutputSpec output;
};

struct FockRunConfig {
    ChannelModel channel = IdealDepolarizing{1.0};
    std::uint64_t n_pairs = 0;
    DetectorParams detector;
    double confidence = 0.99;
    double input_delta = 0.0;
    std::optional<std::uint64_t> seed;
    OutputSpec output;
};

struct VisibilitySweepConfig {
    ChannelKind channel_kind = ChannelKind::RandomRotation;
    PairingPolicy pairing = PairingPolicy::Alternating;
    std::vector<double> mu_values;
    std::vector<double> alpha0_values;
    std::uint64_t n_pairs = 0;
    DetectorParams detector;
    double input_delta = 0.0;
    std::optional<std::uint64_t> seed;
    OutputSpec output;
};

struct DiscriminateConfig {
    ChannelModel channel = IdealDepolarizing{1.0};
    double mu = 0.0;
    std::uint64_t n_pairs = 0;
    DetectorParams detector;
    double k_sigma = 2.0;
    double input_delta = 0.0;
    std::optional<std::uint64_t> seed;
    OutputSpec output;
};

// Parse from config text; `origin` labels error messages (usually the file
// path). Unknown keys and out-of-range values are rejected with the offending
// key and its line.
DopSweepConfig parse_dop_sweep_config(const std::string& text, const std::string& origin);
FockRunConfig parse_fock_run_config(const std::string& text, const std::string& origin);
VisibilitySweepConfig parse_visibility_sweep_config(const std::string& text,
                                                    const std::string& origin);
DiscriminateConfig parse_discriminate_config(const std::string& text, const std::string& origin);

DopSweepConfig load_dop_sweep_config(const std::string& path);
FockRunConfig load_fock_run_config(const std::string& path);
VisibilitySweepConfig load_visibility_sweep_config(const std::string& path);
DiscriminateConfig load_discriminate_config(const std::string& path);

// Serialization of result records emitted by the CLI.
nlohmann::ordered_json channel_to_json(const ChannelModel& channel);
nlohmann::ordered_json detector_to_json(const DetectorParams& det);
nlohmann::ordered_json verdict_to_json(const Verdict& verdict);

}  // namespace homsim

#endif
