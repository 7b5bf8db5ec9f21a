// gapsol command-line front end. Every subcommand builds an ExperimentConfig
// (defaults < preset < --config file < environment < flags) and hands it to
// run_experiment.
#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "gapsol/config.hpp"
#include "gapsol/errors.hpp"
#include "gapsol/runner.hpp"

namespace {

struct Common {
  std::string config_file;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;  // key -> value from convenience options
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("-c,--config", c.config_file, "key = value configuration file");
  app->add_option("-s,--set", c.sets, "override one key, e.g. physics.mu=2.5")->take_all();
  struct Flag {
    const char* name;
    const char* key;
    const char* help;
  };
  static const Flag flags[] = {
      {"--out", "output.dir", "output directory"},
      {"--workers", "run.workers", "worker threads (0 = all cores)"},
      {"--V0", "physics.V0", "lattice depth"},
      {"--g", "physics.g", "nonlinearity"},
      {"--kinetic", "physics.kinetic", "kinetic coefficient c"},
      {"--mu", "physics.mu", "chemical potential"},
      {"--mu-list", "physics.mu_list", "comma-separated chemical potentials"},
      {"--mu-start", "physics.mu_start", "family start"},
      {"--mu-end", "physics.mu_end", "family end"},
      {"--mu-step", "numerics.mu_step", "continuation step"},
      {"--parity", "physics.parity", "in_phase|out_of_phase|both"},
      {"--separation", "physics.separation", "pair separation in periods, or auto"},
      {"--periods", "numerics.periods", "domain length in lattice periods"},
      {"--N", "numerics.N", "grid points"},
      {"--dt", "numerics.dt", "time step"},
      {"--T", "numerics.T", "evolution time"},
      {"--times", "numerics.times", "comma-separated snapshot times"},
      {"--theta-samples", "numerics.theta_samples", "theta samples"},
      {"--theta", "numerics.theta", "quadrature angle in degrees, or opt"},
      {"--backend", "numerics.backend", "stepping|dense_exponential"},
      {"--domain", "numerics.slot_domain", "position|momentum"},
      {"--denominator", "numerics.denominator", "full|normally_ordered"},
  };
  for (const auto& f : flags)
    app->add_option_function<std::string>(
        f.name, [&c, key = std::string(f.key)](const std::string& v) { c.flags[key] = v; }, f.help);
}

gapsol::Assignments flag_assignments(const Common& c, const std::string& task) {
  gapsol::Assignments a;
  if (!task.empty()) a.emplace_back("run.task", task);
  for (const auto& [k, v] : c.flags) a.emplace_back(k, v);
  for (const auto& s : c.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw gapsol::ConfigError("--set expects key=value, got '" + s + "'");
    a.emplace_back(s.substr(0, eq), s.substr(eq + 1));
  }
  return a;
}

int run(const gapsol::ExperimentConfig& cfg) {
  const auto r = gapsol::run_experiment(cfg, &std::cerr);
  std::cout << r.output_dir.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gapsol: gap solitons in an optical lattice and their quantum noise"};
  app.set_version_flag("--version", std::string(gapsol::version()));
  app.require_subcommand(1);

  const std::vector<std::pair<std::string, std::string>> simple = {
      {"bands", "band structure and gap edges"},
      {"soliton", "single gap soliton by Newton iteration"},
      {"family", "soliton family P(mu) by continuation"},
      {"pair", "bound soliton pairs and their interaction energy"},
      {"evolve", "mean-field time evolution of a soliton"},
      {"squeeze", "optimal quadrature squeezing versus time"},
      {"correlate", "slot correlation matrix in x or k"},
      {"entangle", "inter-soliton number correlation C12(t)"},
  };
  std::map<std::string, Common> commons;
  std::string task;
  for (const auto& [name, help] : simple) {
    auto* sub = app.add_subcommand(name, help);
    add_common(sub, commons[name]);
    sub->callback([&task, n = name] { task = n; });
  }

  auto* run_cmd = app.add_subcommand("run", "run a preset or a configuration file");
  std::string preset;
  add_common(run_cmd, commons["run"]);
  run_cmd->add_option("-p,--preset", preset, "fig1 | fig2 | fig3 | fig4 | fig5 | custom");

  auto* replay_cmd = app.add_subcommand("replay", "re-run from a manifest.json");
  std::string manifest, replay_out;
  replay_cmd->add_option("manifest", manifest, "manifest.json of an earlier run")->required();
  replay_cmd->add_option("--out", replay_out, "write into this directory instead");

  auto* keys_cmd = app.add_subcommand("keys", "list configuration keys and defaults");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    if (keys_cmd->parsed()) {
      for (const auto& k : gapsol::config_keys())
        std::cout << k.name << " = " << k.default_value << "    # " << k.help << '\n';
      return 0;
    }
    if (replay_cmd->parsed()) {
      auto cfg = gapsol::config_from_manifest(manifest);
      if (!replay_out.empty()) {
        cfg.output_dir = replay_out;
        cfg.effective["output.dir"] = replay_out;
      }
      return run(cfg);
    }
    std::string name = task;
    if (run_cmd->parsed()) name = "run";
    const Common& c = commons.at(name);
    const auto file = c.config_file.empty() ? gapsol::Assignments{}
                                            : gapsol::read_config_file(c.config_file);
    auto flags = flag_assignments(c, name == "run" ? "" : name);
    if (!preset.empty()) flags.emplace_back("run.preset", preset);
    return run(gapsol::build_config(file, flags));
  } catch (const std::exception& e) {
    std::cerr << "gapsol: " << e.what() << '\n';
    return gapsol::exit_code_for(e);
  }
}
