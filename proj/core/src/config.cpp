#include "gapsol/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "gapsol/errors.hpp"

namespace gapsol {

namespace {

const std::set<std::string> kTasks = {"bands",    "soliton",   "family", "pair",
                                      "evolve",   "squeeze",   "correlate", "entangle",
                                      "fig1",     "fig2",      "fig3",   "fig4", "fig5"};

std::string trim(std::string s) {
  auto ws = [](unsigned char c) { return std::isspace(c); };
  s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), ws));
  s.erase(std::find_if_not(s.rbegin(), s.rend(), ws).base(), s.end());
  return s;
}

double to_real(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  double out = 0.0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size() || !std::isfinite(out))
    throw ConfigError("key '" + key + "': malformed number '" + v + "'");
  return out;
}

long to_int(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  long out = 0;
  auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  if (t.empty() || ec != std::errc() || p != t.data() + t.size())
    throw ConfigError("key '" + key + "': malformed integer '" + v + "'");
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_real(key, item));
  return out;
}

void range(const std::string& key, double v, double lo, double hi) {
  if (!(v >= lo && v <= hi)) {
    std::ostringstream os;
    os << "key '" << key << "': value " << v << " out of range [" << lo << ", " << hi << "]";
    throw ConfigError(os.str());
  }
}

std::string choice(const std::string& key, const std::string& v,
                   const std::vector<std::string>& allowed) {
  const std::string t = trim(v);
  if (std::find(allowed.begin(), allowed.end(), t) == allowed.end()) {
    std::string all;
    for (const auto& a : allowed) all += (all.empty() ? "" : "|") + a;
    throw ConfigError("key '" + key + "': '" + v + "' is not one of " + all);
  }
  return t;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = {
      {"run.preset", "custom", "fig1..fig5 or custom"},
      {"run.task", "soliton", "bands|soliton|family|pair|evolve|squeeze|correlate|entangle|fig1..fig5"},
      {"run.workers", "0", "worker threads, 0 = all cores"},
      {"run.seed", "0", "reserved"},
      {"physics.kinetic", "1", "c in -c d2/dx2"},
      {"physics.V0", "4", "lattice depth"},
      {"physics.g", "1", "nonlinearity"},
      {"physics.gap_index", "1", "finite gap above band n"},
      {"physics.mu", "1.91", "chemical potential"},
      {"physics.mu_list", "", "comma-separated chemical potentials"},
      {"physics.mu_start", "1.91", "family start"},
      {"physics.mu_end", "3.85", "family end"},
      {"physics.parity", "both", "in_phase|out_of_phase|both"},
      {"physics.separation", "4", "pair separation in periods, or auto"},
      {"numerics.periods", "32", "domain length in lattice periods"},
      {"numerics.N", "1024", "grid points"},
      {"numerics.dt", "0.001", "time step"},
      {"numerics.T", "4", "evolution time"},
      {"numerics.checkpoint_every", "10", "steps between checkpoints"},
      {"numerics.times", "4", "comma-separated snapshot times"},
      {"numerics.theta_samples", "64", "theta samples on [0, pi)"},
      {"numerics.theta", "opt", "quadrature angle in degrees, or opt"},
      {"numerics.backend", "stepping", "stepping|dense_exponential"},
      {"numerics.k_samples", "201", "quasimomentum samples"},
      {"numerics.n_bands", "4", "bands to report"},
      {"numerics.cutoff", "32", "plane-wave cutoff"},
      {"numerics.mu_step", "0.02", "continuation step"},
      {"numerics.slot_domain", "position", "position|momentum"},
      {"numerics.x_slots", "40", "position slots"},
      {"numerics.x_window", "10", "position window half-width in periods"},
      {"numerics.k_slots", "65", "momentum slots"},
      {"numerics.k_slot_width", "0.25", "momentum slot width"},
      {"numerics.denominator", "full", "full|normally_ordered"},
      {"output.dir", "gapsol-out", "output directory"},
      {"output.nls_dashed", "bare", "NLS variant labelled 'dashed' in fig2 output"},
  };
  return keys;
}

std::vector<std::string> preset_names() { return {"fig1", "fig2", "fig3", "fig4", "fig5"}; }

const std::map<std::string, std::string>& preset_values(const std::string& name) {
  static const std::map<std::string, std::map<std::string, std::string>> presets = {
      {"fig1",
       {{"run.task", "fig1"}, {"physics.V0", "4"}, {"physics.mu_start", "1.91"},
        {"physics.mu_end", "3.85"}, {"numerics.mu_step", "0.02"},
        {"physics.mu_list", "1.91,3.0,3.85"}}},
      {"fig2",
       {{"run.task", "fig2"}, {"physics.V0", "4"}, {"physics.mu", "1.91"},
        {"numerics.times", "0,0.5,1,1.5,2,2.5,3,3.5,4,5,6,7,8"}}},
      {"fig3",
       {{"run.task", "fig3"}, {"physics.V0", "4"},
        {"physics.mu_list", "1.91,2.0,2.25,2.5,2.75,3.0,3.25,3.5,3.85"}, {"numerics.times", "4"}}},
      {"fig4",
       {{"run.task", "fig4"}, {"physics.V0", "4"}, {"physics.mu_list", "1.91,2.5,3.0,3.85"},
        {"numerics.times", "4"}}},
      {"fig5",
       {{"run.task", "fig5"}, {"physics.V0", "4"}, {"physics.mu", "2.5"},
        {"physics.parity", "both"}, {"physics.separation", "4"},
        {"numerics.times", "0,4,8,12,16,20,24,28,32"}}},
      {"custom", {}},
  };
  const auto it = presets.find(name);
  if (it == presets.end()) throw ConfigError("unknown preset '" + name + "'");
  return it->second;
}

Assignments parse_config_text(const std::string& text, const std::string& origin) {
  Assignments out;
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    if (!section.empty() && key.find('.') == std::string::npos) key = section + "." + key;
    out.emplace_back(key, trim(line.substr(eq + 1)));
  }
  return out;
}

Assignments read_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), path.string());
}

ExperimentConfig build_config(const Assignments& file, const Assignments& flags,
                              bool use_environment) {
  std::map<std::string, std::string> v;
  for (const auto& k : config_keys()) v[k.name] = k.default_value;

  auto check_known = [&](const Assignments& a) {
    for (const auto& [key, value] : a)
      if (!v.count(key)) throw ConfigError("unknown key '" + key + "'");
  };
  check_known(file);
  check_known(flags);

  Assignments env;
  if (use_environment) {
    if (const char* d = std::getenv("GAPSOL_OUTPUT_DIR"); d && *d) env.emplace_back("output.dir", d);
    if (const char* w = std::getenv("GAPSOL_WORKERS"); w && *w) env.emplace_back("run.workers", w);
  }

  std::string preset = "custom";
  for (const Assignments* layer : {&file, static_cast<const Assignments*>(&env), &flags})
    for (const auto& [key, value] : *layer)
      if (key == "run.preset") preset = trim(value);
  for (const auto& [key, value] : preset_values(preset)) v[key] = value;
  v["run.preset"] = preset;
  for (const Assignments* layer : {&file, static_cast<const Assignments*>(&env), &flags})
    for (const auto& [key, value] : *layer) v[key] = value;

  ExperimentConfig c;
  c.preset = preset;
  c.task = trim(v["run.task"]);
  if (!kTasks.count(c.task)) throw ConfigError("key 'run.task': unknown task '" + c.task + "'");
  {
    const long w = to_int("run.workers", v["run.workers"]);
    range("run.workers", static_cast<double>(w), 0, 1024);
    c.workers = static_cast<unsigned>(w);
  }
  c.seed = to_int("run.seed", v["run.seed"]);

  c.model.kinetic = to_real("physics.kinetic", v["physics.kinetic"]);
  if (c.model.kinetic <= 0.0) throw ConfigError("key 'physics.kinetic': must be positive");
  c.model.lattice_depth = to_real("physics.V0", v["physics.V0"]);
  range("physics.V0", c.model.lattice_depth, 0.0, 200.0);
  c.model.nonlinearity = to_real("physics.g", v["physics.g"]);
  range("physics.g", c.model.nonlinearity, -100.0, 100.0);
  c.gap_index = static_cast<int>(to_int("physics.gap_index", v["physics.gap_index"]));
  range("physics.gap_index", c.gap_index, 1, 8);
  c.mu = to_real("physics.mu", v["physics.mu"]);
  c.mu_list = to_list("physics.mu_list", v["physics.mu_list"]);
  c.mu_start = to_real("physics.mu_start", v["physics.mu_start"]);
  c.mu_end = to_real("physics.mu_end", v["physics.mu_end"]);
  if (c.mu_end < c.mu_start) throw ConfigError("key 'physics.mu_end': below physics.mu_start");
  c.parity = choice("physics.parity", v["physics.parity"], {"in_phase", "out_of_phase", "both"});
  if (trim(v["physics.separation"]) == "auto") {
    c.separation = 0;
  } else {
    c.separation = static_cast<int>(to_int("physics.separation", v["physics.separation"]));
    range("physics.separation", c.separation, 1, 64);
  }

  c.periods = static_cast<int>(to_int("numerics.periods", v["numerics.periods"]));
  range("numerics.periods", c.periods, 1, 4096);
  const long n = to_int("numerics.N", v["numerics.N"]);
  range("numerics.N", static_cast<double>(n), 64, 1 << 20);
  if ((n & (n - 1)) != 0) throw ConfigError("key 'numerics.N': must be a power of two");
  c.num_points = static_cast<std::size_t>(n);
  c.dt = to_real("numerics.dt", v["numerics.dt"]);
  range("numerics.dt", c.dt, 1e-7, 0.1);
  c.duration = to_real("numerics.T", v["numerics.T"]);
  range("numerics.T", c.duration, -1e4, 1e4);
  c.checkpoint_every = static_cast<int>(to_int("numerics.checkpoint_every", v["numerics.checkpoint_every"]));
  range("numerics.checkpoint_every", c.checkpoint_every, 1, 1000000);
  c.times = to_list("numerics.times", v["numerics.times"]);
  for (double t : c.times) range("numerics.times", t, 0.0, 1e4);
  c.theta_samples = static_cast<int>(to_int("numerics.theta_samples", v["numerics.theta_samples"]));
  range("numerics.theta_samples", c.theta_samples, 8, 100000);
  if (trim(v["numerics.theta"]) != "opt")
    c.theta = to_real("numerics.theta", v["numerics.theta"]) * std::numbers::pi / 180.0;
  c.backend = choice("numerics.backend", v["numerics.backend"], {"stepping", "dense_exponential"}) ==
                      "stepping"
                  ? Backend::stepping
                  : Backend::dense_exponential;
  c.k_samples = static_cast<int>(to_int("numerics.k_samples", v["numerics.k_samples"]));
  range("numerics.k_samples", c.k_samples, 2, 100000);
  c.n_bands = static_cast<int>(to_int("numerics.n_bands", v["numerics.n_bands"]));
  range("numerics.n_bands", c.n_bands, 1, 64);
  c.cutoff = static_cast<int>(to_int("numerics.cutoff", v["numerics.cutoff"]));
  range("numerics.cutoff", c.cutoff, 2, 4096);
  if (c.cutoff < 2 * c.n_bands) throw ConfigError("key 'numerics.cutoff': must be >= 2 x numerics.n_bands");
  c.mu_step = to_real("numerics.mu_step", v["numerics.mu_step"]);
  range("numerics.mu_step", c.mu_step, 1e-6, 10.0);
  c.slot_domain = choice("numerics.slot_domain", v["numerics.slot_domain"], {"position", "momentum"}) ==
                          "position"
                      ? SlotDomain::position
                      : SlotDomain::momentum;
  c.x_slots = static_cast<int>(to_int("numerics.x_slots", v["numerics.x_slots"]));
  range("numerics.x_slots", c.x_slots, 1, 100000);
  c.x_window = to_real("numerics.x_window", v["numerics.x_window"]);
  range("numerics.x_window", c.x_window, 1e-3, 1e6);
  c.k_slots = static_cast<int>(to_int("numerics.k_slots", v["numerics.k_slots"]));
  range("numerics.k_slots", c.k_slots, 1, 100000);
  c.k_slot_width = to_real("numerics.k_slot_width", v["numerics.k_slot_width"]);
  range("numerics.k_slot_width", c.k_slot_width, 1e-6, 100.0);
  c.denominator = choice("numerics.denominator", v["numerics.denominator"],
                         {"full", "normally_ordered"}) == "full"
                      ? Denominator::full
                      : Denominator::normally_ordered;

  c.output_dir = trim(v["output.dir"]);
  if (c.output_dir.empty()) throw ConfigError("key 'output.dir': empty path");
  c.nls_dashed = choice("output.nls_dashed", v["output.nls_dashed"], {"bare", "lattice_modified"});

  c.effective = std::move(v);
  return c;
}

}  // namespace gapsol
