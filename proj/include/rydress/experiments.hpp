#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rydress/config.hpp"

namespace rydress {

struct OutputFile {
  std::string name;  // file name relative to the output directory
  std::string contents;
};

struct ExperimentOutput {
  std::string command;
  std::vector<OutputFile> files;
  nlohmann::json summary;  // includes the resolved config and version
  /// Set when the run produced output but its analysis step failed; the
  /// summary then carries the message under results.error.
  std::optional<std::string> numerical_error;
};

const std::vector<std::string>& experiment_names();

/// Runs one named experiment. Throws ConfigError for unusable
/// configurations and NumericalError/ProtocolError from the physics.
ExperimentOutput run_experiment(const std::string& command, const ExperimentConfig& config);

ExperimentOutput run_jcurve(const ExperimentConfig& config);
ExperimentOutput run_scan(const ExperimentConfig& config);
ExperimentOutput run_rabi(const ExperimentConfig& config);
ExperimentOutput run_bell(const ExperimentConfig& config);
ExperimentOutput run_lifetime(const ExperimentConfig& config);
ExperimentOutput run_recapture(const ExperimentConfig& config);

/// Quasi-static Doppler offsets of the dressing detuning, one per shot, from
/// the per-shot RNG streams. A single zero offset when the temperature is 0.
std::vector<double> doppler_offsets(const ExperimentConfig& config);

const char* version();

}  // namespace rydress
