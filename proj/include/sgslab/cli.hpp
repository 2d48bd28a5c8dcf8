#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgslab/hamiltonians.hpp"
#include "sgslab/pipeline.hpp"

namespace sgs {

inline constexpr const char* kToolVersion = "0.1.0";

enum ExitCode { kExitOk = 0, kExitFit = 1, kExitConfig = 2 };

struct ConfigError : Error {
    using Error::Error;
};

struct MoleculeInput {
    std::string label;
    std::string path;
};

struct RunConfig {
    ExperimentConfig experiment = ExperimentConfig::ising_defaults();
    std::string noise_label = "none";  // none, aria, custom:<path>
    // ising
    IsingSpec ising = IsingSpec::chain(4, 1.0, 0.0);
    std::vector<double> h3_values{2.0, 2.25, 2.5, 2.75, 3.0};
    std::string observable;  // empty: X on site 0
    // molecule
    std::vector<MoleculeInput> molecules;
};

// Parses the JSON config; `defaults` supplies the command-specific experiment defaults.
RunConfig parse_run_config(const nlohmann::json& j, const ExperimentConfig& defaults);
nlohmann::json to_json(const RunConfig& c, bool molecule);
nlohmann::json to_json(const NoiseModel& m);
NoiseModel parse_noise_model(const nlohmann::json& j, const std::string& path);

std::string sha256_hex(const std::string& data);
void write_file_atomic(const std::filesystem::path& path, const std::string& data);

int run_cli(const std::vector<std::string>& args);

}  // namespace sgs
