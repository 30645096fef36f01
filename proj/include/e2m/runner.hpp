#pragma once

// Resolved run configuration and the three workflows behind the CLI.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "e2m/monte_carlo.hpp"

namespace e2m {

enum class Command { Generate, Fit, Sweep };
std::string_view to_string(Command c);
Command parse_command(std::string_view s);

enum class InitRule { QuantileSpread, Offset, Explicit };

struct RunConfig {
  Command command = Command::Fit;
  ExperimentConfig experiment;
  std::vector<LabelMethod> methods{LabelMethod::Uncertain, LabelMethod::Noisy, LabelMethod::Unknown};
  std::size_t reps = 20;
  std::uint64_t seed = 1;
  std::filesystem::path out = ".";
  std::size_t workers = 1;

  // fit
  std::optional<std::filesystem::path> data;
  std::optional<std::filesystem::path> labels;
  std::optional<std::vector<ContourFunction>> inline_labels;
  InitRule init = InitRule::QuantileSpread;
  std::optional<MixtureParams> init_params;

  // sweep
  SweepVariable sweep_variable = SweepVariable::Rho;
  std::vector<double> grid;
  bool svg = false;

  nlohmann::json resolved;  // fully resolved settings, echoed to the manifest

  SweepSpec sweep_spec() const;
};

// Keys accepted in config files and overrides.
const std::vector<std::string>& config_keys();

// `overrides` wins over `file`. `command`, when given, wins over both.
// Throws ConfigError naming the offending field.
RunConfig parse_config(const nlohmann::json& file, const nlohmann::json& overrides,
                       std::optional<Command> command = std::nullopt);
nlohmann::json load_config_file(const std::filesystem::path& path);

struct RunOutcome {
  bool converged = true;
  std::vector<std::filesystem::path> files;
};

RunOutcome cmd_generate(const RunConfig& cfg);
RunOutcome cmd_fit(const RunConfig& cfg);
RunOutcome cmd_sweep(const RunConfig& cfg);
RunOutcome run_command(const RunConfig& cfg);

std::string_view version();

}  // namespace e2m
