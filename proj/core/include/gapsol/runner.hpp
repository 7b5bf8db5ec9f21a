#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "gapsol/config.hpp"

namespace gapsol {

struct RunResult {
  std::filesystem::path output_dir;
  std::vector<std::string> files;  // relative to output_dir
  double wall_seconds = 0.0;
};

/// Runs the task named in the config, writing CSV/JSON outputs and
/// manifest.json into config.output_dir. Errors carry the failing module and
/// its parameters in the message; InvalidArgument and ConfigError mean bad
/// input, NumericalError a failed computation.
RunResult run_experiment(const ExperimentConfig& config, std::ostream* log = nullptr);

/// Rebuilds the configuration recorded in a manifest. Environment overrides
/// are ignored so the replay matches the recorded run.
ExperimentConfig config_from_manifest(const std::filesystem::path& manifest);

/// 0 success, 2 configuration or argument error, 3 numerical failure, 1 other.
int exit_code_for(const std::exception& e);

const char* version();

}  // namespace gapsol
