#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "gapsol/correlations.hpp"
#include "gapsol/model.hpp"
#include "gapsol/squeezing.hpp"

namespace gapsol {

/// Validated run parameters. Every field maps to one dotted key (see
/// config_keys()); `effective` keeps the final textual value of every key.
struct ExperimentConfig {
  std::string preset = "custom";
  std::string task = "soliton";
  unsigned workers = 0;
  long seed = 0;  // reserved: the pipeline is deterministic

  Model model;
  int gap_index = 1;
  double mu = 1.91;
  std::vector<double> mu_list;
  double mu_start = 1.91;
  double mu_end = 3.85;
  std::string parity = "both";
  int separation = 4;  // 0 selects the smallest of 1, 2, 3 that converges

  int periods = 32;
  std::size_t num_points = 1024;
  double dt = 1e-3;
  double duration = 4.0;
  int checkpoint_every = 10;
  std::vector<double> times{4.0};
  int theta_samples = 64;
  std::optional<double> theta;  // empty: optimal quadrature
  Backend backend = Backend::stepping;
  int k_samples = 201;
  int n_bands = 4;
  int cutoff = 32;
  double mu_step = 0.02;
  SlotDomain slot_domain = SlotDomain::position;
  int x_slots = 40;
  double x_window = 10.0;  // half-width in lattice periods
  int k_slots = 65;
  double k_slot_width = 0.25;
  Denominator denominator = Denominator::full;

  std::filesystem::path output_dir = "gapsol-out";
  std::string nls_dashed = "bare";

  std::map<std::string, std::string> effective;
};

struct ConfigKey {
  std::string name;
  std::string default_value;
  std::string help;
};

/// All accepted keys with their defaults.
const std::vector<ConfigKey>& config_keys();
/// Names of the built-in presets.
std::vector<std::string> preset_names();
/// Key overrides a preset applies on top of the defaults.
const std::map<std::string, std::string>& preset_values(const std::string& name);

using Assignments = std::vector<std::pair<std::string, std::string>>;

/// key = value lines; '#' starts a comment; [section] headers prefix later keys.
Assignments parse_config_text(const std::string& text, const std::string& origin = "config");
Assignments read_config_file(const std::filesystem::path& path);

/// Layers: defaults < preset < file < environment < flags. The preset is
/// taken from the last `run.preset` seen in any layer. GAPSOL_OUTPUT_DIR and
/// GAPSOL_WORKERS form the environment layer. Throws ConfigError.
ExperimentConfig build_config(const Assignments& file, const Assignments& flags,
                              bool use_environment = true);

}  // namespace gapsol
