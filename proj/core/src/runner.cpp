#include "gapsol/runner.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include "gapsol/bands.hpp"
#include "gapsol/correlations.hpp"
#include "gapsol/dynamics.hpp"
#include "gapsol/errors.hpp"
#include "gapsol/field_io.hpp"
#include "gapsol/parallel.hpp"
#include "gapsol/spectral.hpp"
#include "gapsol/squeezing.hpp"
#include "gapsol/stationary.hpp"
#include "json.hpp"

#ifndef GAPSOL_VERSION
#define GAPSOL_VERSION "0.0.0"
#endif

namespace gapsol {

namespace {

using json = nlohmann::json;
constexpr double kPi = std::numbers::pi;
constexpr double kDeg = 180.0 / kPi;

std::string g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string tag(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

class Csv {
 public:
  explicit Csv(const std::vector<std::string>& header) {
    for (std::size_t i = 0; i < header.size(); ++i) body_ << (i ? "," : "") << header[i];
    body_ << '\n';
  }
  void row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) body_ << (i ? "," : "") << g17(values[i]);
    body_ << '\n';
  }
  std::string str() const { return body_.str(); }

 private:
  std::ostringstream body_;
};

// Wraps a module call so failures name the module and the parameters.
template <class F>
auto in_module(const std::string& module, const std::string& params, F&& f) -> decltype(f()) {
  const std::string where = "[" + module + "] " + params + ": ";
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidArgument& e) {
    throw InvalidArgument(where + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + e.what());
  }
}

class Context {
 public:
  Context(const ExperimentConfig& c, std::ostream* log) : cfg(c), log_(log) {
    grid = in_module("spectral-core", "L = " + tag(c.periods) + " pi, N = " + tag(c.num_points),
                     [&] { return make_grid(c.periods * kPi, c.num_points); });
    std::filesystem::create_directories(c.output_dir);
  }

  void say(const std::string& msg) const {
    if (log_) *log_ << msg << std::endl;
  }

  void write_text(const std::string& name, const std::string& text) {
    const auto path = cfg.output_dir / name;
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) throw InvalidArgument("cannot write " + path.string());
    files.push_back(name);
  }
  void write_csv(const std::string& name, const Csv& csv) { write_text(name, csv.str()); }
  void write_json(const std::string& name, const json& j) { write_text(name, j.dump(2) + "\n"); }
  void write_profile(const std::string& name, const ComplexField& f, const std::string& what) {
    write_field(cfg.output_dir / name, f, what);
    files.push_back(name);
    files.push_back(name + ".json");
  }

  const BandEdgeData& edge() {
    if (!edge_) {
      const Edge which = cfg.model.nonlinearity >= 0.0 ? Edge::low : Edge::high;
      edge_ = std::make_unique<BandEdgeData>(in_module(
          "bloch-bands", "V0 = " + tag(cfg.model.lattice_depth),
          [&] { return band_edge_data(cfg.model, cfg.gap_index, which, cfg.cutoff); }));
    }
    return *edge_;
  }

  /// Single soliton at mu: envelope-seeded Newton, falling back to
  /// continuation from the edge when the seed is too far off.
  const StationaryState& single(double mu) {
    for (const auto& [m, s] : singles_)
      if (std::abs(m - mu) < 1e-12) return *s;
    const std::string params = "mu = " + tag(mu) + ", V0 = " + tag(cfg.model.lattice_depth);
    auto st = in_module("stationary-states", params, [&]() -> StationaryState {
      try {
        return newton_solve(envelope_seed(mu, edge(), grid), mu, cfg.model);
      } catch (const NumericalError&) {
        say("  envelope seed failed at mu = " + tag(mu) + ", continuing from the edge");
        const double step = std::copysign(cfg.mu_step, mu - edge().edge_energy);
        const double start = edge().edge_energy + step;
        FamilyBranch b = step > 0 ? continue_family(start, mu, step, edge(), cfg.model, grid)
                                  : continue_family(mu, start, -step, edge(), cfg.model, grid);
        return step > 0 ? *b.points.back().state : *b.points.front().state;
      }
    });
    singles_.emplace_back(mu, std::make_unique<StationaryState>(std::move(st)));
    return *singles_.back().second;
  }

  int separation(const StationaryState& s) {
    if (cfg.separation > 0) return cfg.separation;
    return in_module("stationary-states", "auto separation at mu = " + tag(s.chemical_potential),
                     [&] { return auto_pair_separation(s); });
  }

  std::vector<Parity> parities() const {
    if (cfg.parity == "in_phase") return {Parity::in_phase};
    if (cfg.parity == "out_of_phase") return {Parity::out_of_phase};
    return {Parity::in_phase, Parity::out_of_phase};
  }

  SqueezingOptions squeeze_options() const {
    SqueezingOptions o;
    o.dt = cfg.dt;
    o.theta_samples = cfg.theta_samples;
    o.backend = cfg.backend;
    return o;
  }

  SlotPartition partition(SlotDomain d) const {
    if (d == SlotDomain::position)
      return SlotPartition::position(grid, -cfg.x_window * kPi, cfg.x_window * kPi, cfg.x_slots);
    return SlotPartition::momentum(grid, -0.5 * cfg.k_slots * cfg.k_slot_width,
                                   cfg.k_slot_width, cfg.k_slots);
  }

  const ExperimentConfig& cfg;
  GridPtr grid;
  std::vector<std::string> files;
  json results = json::object();

 private:
  std::ostream* log_;
  std::unique_ptr<BandEdgeData> edge_;
  std::vector<std::pair<double, std::unique_ptr<StationaryState>>> singles_;
};

json edge_json(const BandEdgeData& e) {
  return {{"gap_index", e.gap_index},
          {"edge", e.edge == Edge::low ? "low" : "high"},
          {"edge_energy", e.edge_energy},
          {"quasimomentum", e.quasimomentum},
          {"effective_mass", e.effective_mass},
          {"effective_nonlinearity", e.effective_nonlinearity},
          {"gap_low", e.gap.low},
          {"gap_high", e.gap.high}};
}

json state_json(const StationaryState& s) {
  return {{"mu", s.chemical_potential},     {"norm", s.norm},
          {"residual", s.residual},         {"iterations", s.iterations},
          {"kind", to_string(s.kind)},      {"center", s.center},
          {"separation_periods", s.separation_periods},
          {"kinetic", s.model.kinetic},     {"V0", s.model.lattice_depth},
          {"g", s.model.nonlinearity},      {"domain_length", s.grid().length()},
          {"num_points", s.grid().size()}};
}

void write_matrix(Context& ctx, const std::string& stem, const CorrelationMatrix& c,
                  const json& extra) {
  std::vector<std::string> header{c.domain == SlotDomain::position ? "x" : "k"};
  for (double s : c.centers) header.push_back(g17(s));
  Csv csv(header);
  std::ostringstream heat;
  for (Eigen::Index i = 0; i < c.values.rows(); ++i) {
    std::vector<double> row{c.centers[i]};
    for (Eigen::Index j = 0; j < c.values.cols(); ++j) {
      row.push_back(c.values(i, j));
      heat << g17(c.centers[i]) << ' ' << g17(c.centers[j]) << ' ' << g17(c.values(i, j)) << '\n';
    }
    heat << '\n';
    csv.row(row);
  }
  ctx.write_csv(stem + ".csv", csv);
  ctx.write_text(stem + ".dat", heat.str());
  json meta = {{"theta_rad", c.theta},
               {"theta_deg", c.theta * kDeg},
               {"time", c.time},
               {"domain", to_string(c.domain)},
               {"denominator", to_string(c.denominator)},
               {"numerator", "Re int conj(p_i) p_j - Re int conj(w_i) w_j"},
               {"slots", c.centers.size()}};
  meta.update(extra);
  ctx.write_json(stem + ".json", meta);
}

double theta_for(Context& ctx, const StationaryState& s, double t) {
  if (ctx.cfg.theta) return *ctx.cfg.theta;
  return optimal_squeezing(s, t, ctx.squeeze_options()).theta_opt;
}

CorrelationMatrix correlate_state(Context& ctx, const StationaryState& s, double t, double theta,
                                  const SlotPartition& part) {
  const Trajectory traj = stationary_trajectory(s, t, ctx.cfg.dt);
  return correlation_matrix(traj, t, theta, part, ctx.cfg.denominator, ctx.cfg.workers);
}

json bragg_json(const BraggReport& r) {
  json entries = json::array();
  for (const auto& e : r.entries)
    entries.push_back({{"k_i", e.k_i}, {"k_j", e.k_j}, {"C", e.value}, {"exceeds", e.exceeds}});
  return {{"offdiagonal_median", r.offdiagonal_median}, {"factor", r.factor}, {"entries", entries}};
}

// ---- tasks ----

void task_bands(Context& ctx) {
  const auto& c = ctx.cfg;
  const BandStructure bs = in_module("bloch-bands", "V0 = " + tag(c.model.lattice_depth), [&] {
    return band_structure(c.model, c.k_samples, c.n_bands, c.cutoff, c.workers);
  });
  std::vector<std::string> header{"k"};
  for (int n = 1; n <= bs.num_bands(); ++n) header.push_back("E" + std::to_string(n));
  Csv csv(header);
  for (std::size_t i = 0; i < bs.quasimomenta.size(); ++i) {
    std::vector<double> row{bs.quasimomenta[i]};
    for (int n = 0; n < bs.num_bands(); ++n) row.push_back(bs.energies(static_cast<Eigen::Index>(i), n));
    csv.row(row);
  }
  ctx.write_csv("bands.csv", csv);
  json gaps = json::array();
  for (int n = 1; n < bs.num_bands(); ++n) {
    try {
      const GapEdges e = gap_edges(bs, n);
      gaps.push_back({{"gap_index", n}, {"low", e.low}, {"high", e.high}, {"k_low", e.k_low},
                      {"k_high", e.k_high}, {"open", true}});
    } catch (const NoGapError&) {
      gaps.push_back({{"gap_index", n}, {"open", false}});
    }
  }
  ctx.write_json("gaps.json", {{"V0", c.model.lattice_depth}, {"kinetic", c.model.kinetic},
                               {"cutoff", c.cutoff}, {"gaps", gaps}});
  ctx.results["gaps"] = gaps;
}

void task_soliton(Context& ctx) {
  const StationaryState& s = ctx.single(ctx.cfg.mu);
  ctx.write_profile("profile.csv", s.profile, "gap soliton mu = " + tag(s.chemical_potential));
  json j = state_json(s);
  j["edge"] = edge_json(ctx.edge());
  ctx.write_json("soliton.json", j);
  ctx.results["soliton"] = j;
}

void task_family(Context& ctx) {
  const auto& c = ctx.cfg;
  const FamilyBranch b = in_module(
      "stationary-states", "mu in [" + tag(c.mu_start) + ", " + tag(c.mu_end) + "]", [&] {
        return continue_family(c.mu_start, c.mu_end, c.mu_step, ctx.edge(), c.model, ctx.grid);
      });
  Csv csv({"mu", "P", "residual"});
  for (const auto& p : b.points) csv.row({p.mu, p.norm, p.residual});
  ctx.write_csv("branch.csv", csv);
  json profiles = json::array();
  for (double mu : c.mu_list) {
    const StationaryState* s = nullptr;
    for (const auto& p : b.points)
      if (std::abs(p.mu - mu) < 1e-9) s = p.state.get();
    if (!s) s = &ctx.single(mu);
    const std::string name = "profile_mu" + tag(mu) + ".csv";
    ctx.write_profile(name, s->profile, "gap soliton mu = " + tag(mu));
    profiles.push_back({{"mu", mu}, {"file", name}, {"norm", s->norm}});
  }
  ctx.write_json("family.json", {{"edge", edge_json(ctx.edge())},
                                 {"points", b.points.size()},
                                 {"mu_step", c.mu_step},
                                 {"profiles", profiles}});
  ctx.results["family_points"] = b.points.size();
}

json pair_block(Context& ctx, const StationaryState& single, int sep, Parity par,
                StationaryState* out) {
  const std::string params = "mu = " + tag(single.chemical_potential) + ", separation = " +
                             std::to_string(sep) + ", " + to_string(par);
  StationaryState p = in_module("stationary-states", params,
                                [&] { return solve_pair(single, sep, par); });
  auto [a, b] = pair_constituents(single, sep, par);
  const double e12 = interaction_energy(a, b, single.model);
  ctx.write_profile(std::string("pair_") + to_string(par) + ".csv", p.profile,
                    std::string("bound pair, ") + to_string(par));
  json j = state_json(p);
  j["E12"] = e12;
  j["norm_ratio"] = p.norm / (2.0 * single.norm);
  j["parity_defect"] = parity_defect(p);
  if (out) *out = std::move(p);
  return j;
}

void task_pair(Context& ctx) {
  const StationaryState& s = ctx.single(ctx.cfg.mu);
  const int sep = ctx.separation(s);
  json j = {{"single", state_json(s)},
            {"separation_periods", sep},
            {"separation_rule", ctx.cfg.separation > 0 ? "fixed" : "auto (1, 2, 3)"}};
  for (Parity par : ctx.parities()) j[to_string(par)] = pair_block(ctx, s, sep, par, nullptr);
  ctx.write_json("pair.json", j);
  ctx.results["pair"] = j;
}

void task_evolve(Context& ctx) {
  const auto& c = ctx.cfg;
  const StationaryState& s = ctx.single(c.mu);
  const Trajectory tr = in_module("meanfield-dynamics", "T = " + tag(c.duration) + ", dt = " + tag(c.dt),
                                  [&] { return evolve(s.profile, c.model, c.duration, c.dt, c.checkpoint_every); });
  Csv diag({"t", "norm", "energy", "max_abs"});
  json cps = json::array();
  const double p0 = norm(tr.checkpoints().front());
  const double e0 = gpe_energy(tr.checkpoints().front(), c.model);
  double norm_drift = 0.0, energy_drift = 0.0;
  for (std::size_t i = 0; i < tr.checkpoints().size(); ++i) {
    const auto& f = tr.checkpoints()[i];
    const double p = norm(f), e = gpe_energy(f, c.model);
    norm_drift = std::max(norm_drift, std::abs(p - p0) / p0);
    energy_drift = std::max(energy_drift, std::abs(e - e0) / std::abs(e0));
    diag.row({tr.times()[i], p, e, f.max_abs()});
    char name[64];
    std::snprintf(name, sizeof name, "trajectory/checkpoint_%06d.csv", tr.checkpoint_steps()[i]);
    ctx.write_profile(name, f, "t = " + g17(tr.times()[i]));
    cps.push_back({{"step", tr.checkpoint_steps()[i]}, {"time", tr.times()[i]}, {"file", name}});
  }
  ctx.write_csv("trajectory/diagnostics.csv", diag);
  json m = {{"dt", tr.dt()},
            {"steps", tr.steps()},
            {"checkpoint_every", tr.checkpoint_every()},
            {"initial", state_json(s)},
            {"norm_drift", norm_drift},
            {"energy_drift", energy_drift},
            {"checkpoints", cps}};
  ctx.write_json("trajectory/manifest.json", m);
  ctx.results["norm_drift"] = norm_drift;
  ctx.results["energy_drift"] = energy_drift;
}

void write_squeeze_curve(Context& ctx, const std::string& name, const SqueezingResult& r) {
  Csv curve({"theta", "R"});
  for (std::size_t i = 0; i < r.thetas.size(); ++i) curve.row({r.thetas[i], r.r_of_theta[i]});
  ctx.write_csv(name, curve);
}

std::vector<SqueezingResult> squeeze_series(Context& ctx, const StationaryState& s) {
  const auto& times = ctx.cfg.times;
  std::vector<SqueezingResult> out(times.size());
  parallel_for(times.size(), ctx.cfg.workers, [&](std::size_t i) {
    out[i] = in_module("quantum-linearized",
                       "mu = " + tag(s.chemical_potential) + ", t = " + tag(times[i]),
                       [&] { return optimal_squeezing(s, times[i], ctx.squeeze_options()); });
  });
  return out;
}

void task_squeeze(Context& ctx) {
  const StationaryState& s = ctx.single(ctx.cfg.mu);
  const auto rs = squeeze_series(ctx, s);
  Csv csv({"t", "theta_opt_deg", "R_min"});
  json arr = json::array();
  for (const auto& r : rs) {
    csv.row({r.time, r.theta_opt * kDeg, r.r_min});
    write_squeeze_curve(ctx, "R_theta_t" + tag(r.time) + ".csv", r);
    arr.push_back({{"t", r.time}, {"theta_opt_deg", r.theta_opt * kDeg}, {"R_min", r.r_min},
                   {"flat", r.flat}});
  }
  ctx.write_csv("squeeze.csv", csv);
  ctx.write_json("squeeze.json", {{"state", state_json(s)}, {"backend", to_string(ctx.cfg.backend)},
                                  {"results", arr}});
  ctx.results["squeeze"] = arr;
}

void task_correlate(Context& ctx) {
  const auto& c = ctx.cfg;
  const StationaryState& s = ctx.single(c.mu);
  const SlotPartition part = ctx.partition(c.slot_domain);
  for (double t : c.times) {
    const double theta = theta_for(ctx, s, t);
    const auto m = in_module("correlations", "mu = " + tag(c.mu) + ", t = " + tag(t),
                             [&] { return correlate_state(ctx, s, t, theta, part); });
    json extra = {{"state", state_json(s)}};
    if (c.slot_domain == SlotDomain::momentum) extra["bragg"] = bragg_json(bragg_peak_report(m, part));
    write_matrix(ctx, std::string("corr_") + to_string(c.slot_domain) + "_t" + tag(t), m, extra);
  }
}

void task_entangle(Context& ctx) {
  const auto& c = ctx.cfg;
  const StationaryState& s = ctx.single(c.mu);
  const int sep = ctx.separation(s);
  IntersolitonOptions io;
  io.dt = c.dt;
  io.denominator = c.denominator;
  io.workers = c.workers;
  std::vector<std::string> header{"t"};
  std::vector<std::vector<C12Point>> series;
  json j = {{"separation_periods", sep}};
  for (Parity par : ctx.parities()) {
    StationaryState p;
    json block = pair_block(ctx, s, sep, par, &p);
    auto ser = in_module("correlations", std::string("C12, ") + to_string(par),
                         [&] { return intersoliton_correlation(p, c.times, io); });
    block["half_extremum_time"] = half_extremum_time(ser);
    j[to_string(par)] = block;
    header.push_back(std::string("C12_") + to_string(par));
    series.push_back(std::move(ser));
  }
  Csv csv(header);
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    std::vector<double> row{c.times[i]};
    for (const auto& ser : series) row.push_back(ser[i].c12);
    csv.row(row);
  }
  ctx.write_csv("c12.csv", csv);
  ctx.write_json("entangle.json", j);
  ctx.results["entangle"] = j;
}

void task_fig1(Context& ctx) {
  task_bands(ctx);
  task_family(ctx);
}

void task_fig2(Context& ctx) {
  const auto& c = ctx.cfg;
  const StationaryState& s = ctx.single(c.mu);
  std::map<NlsVariant, NlsReference> refs;
  json jr = json::object();
  for (NlsVariant v : {NlsVariant::lattice_modified, NlsVariant::bare}) {
    refs.emplace(v, in_module("quantum-linearized", std::string("NLS reference ") + to_string(v),
                              [&] { return nls_reference(ctx.edge(), c.mu, v, ctx.grid, c.model); }));
    const auto& r = refs.at(v);
    jr[to_string(v)] = {{"dispersion", r.dispersion}, {"nonlinearity", r.nonlinearity},
                        {"width", r.width}, {"amplitude", r.amplitude},
                        {"detuning", r.state.chemical_potential}, {"norm", r.state.norm},
                        {"gap_fraction", r.gap_fraction},
                        {"outside_validity", r.outside_validity}};
    ctx.write_profile(std::string("nls_") + to_string(v) + ".csv", r.state.profile,
                      std::string("NLS reference, ") + to_string(v));
  }
  const std::vector<const StationaryState*> states{&s, &refs.at(NlsVariant::lattice_modified).state,
                                                   &refs.at(NlsVariant::bare).state};
  std::vector<std::vector<double>> r(states.size(), std::vector<double>(c.times.size()));
  parallel_for(states.size() * c.times.size(), c.workers, [&](std::size_t k) {
    const std::size_t a = k / c.times.size(), i = k % c.times.size();
    r[a][i] = optimal_squeezing(*states[a], c.times[i], ctx.squeeze_options()).r_min;
  });
  Csv csv({"t", "R_gap", "R_lattice_modified", "R_bare"});
  for (std::size_t i = 0; i < c.times.size(); ++i) csv.row({c.times[i], r[0][i], r[1][i], r[2][i]});
  ctx.write_csv("fig2_R.csv", csv);
  const std::string dashed = c.nls_dashed;
  const std::string dotdashed = dashed == "bare" ? "lattice_modified" : "bare";
  ctx.write_json("fig2.json", {{"gap_soliton", state_json(s)},
                               {"references", jr},
                               {"curves", {{"solid", "R_gap"},
                                           {"dashed", "R_" + dashed},
                                           {"dot_dashed", "R_" + dotdashed}}}});
}

void task_fig3(Context& ctx) {
  const auto& c = ctx.cfg;
  Csv csv({"mu", "t", "R_min", "theta_opt_deg"});
  for (double mu : c.mu_list) {
    const auto rs = squeeze_series(ctx, ctx.single(mu));
    for (const auto& r : rs) csv.row({mu, r.time, r.r_min, r.theta_opt * kDeg});
  }
  ctx.write_csv("fig3.csv", csv);
}

void task_fig4(Context& ctx) {
  const auto& c = ctx.cfg;
  const SlotPartition px = ctx.partition(SlotDomain::position);
  const SlotPartition pk = ctx.partition(SlotDomain::momentum);
  for (double t : c.times) {
    for (double mu : c.mu_list) {
      const StationaryState& s = ctx.single(mu);
      const double theta = theta_for(ctx, s, t);
      const auto m = in_module("correlations", "mu = " + tag(mu) + ", t = " + tag(t),
                               [&] { return correlate_state(ctx, s, t, theta, px); });
      ctx.write_profile("profile_mu" + tag(mu) + ".csv", s.profile, "gap soliton mu = " + tag(mu));
      write_matrix(ctx, "corr_x_mu" + tag(mu) + "_t" + tag(t), m, {{"state", state_json(s)}});
    }
    // Number correlations (theta = 0) in k for the near-edge soliton and its envelope NLS.
    if (!c.mu_list.empty()) {
      const StationaryState& s = ctx.single(c.mu_list.front());
      const auto mk = correlate_state(ctx, s, t, 0.0, pk);
      write_matrix(ctx, "corr_k_mu" + tag(s.chemical_potential) + "_t" + tag(t), mk,
                   {{"state", state_json(s)}, {"bragg", bragg_json(bragg_peak_report(mk, pk))}});
      const NlsReference ref =
          nls_reference(ctx.edge(), s.chemical_potential, NlsVariant::lattice_modified, ctx.grid, c.model);
      const auto mn = correlate_state(ctx, ref.state, t, 0.0, pk);
      write_matrix(ctx, "corr_k_nls_t" + tag(t), mn,
                   {{"state", state_json(ref.state)}, {"bragg", bragg_json(bragg_peak_report(mn, pk))}});
    }
  }
}

void task_fig5(Context& ctx) {
  const auto& c = ctx.cfg;
  task_entangle(ctx);
  const StationaryState& s = ctx.single(c.mu);
  const int sep = ctx.separation(s);
  std::vector<std::string> header{"t"};
  std::vector<std::vector<double>> cols;
  for (Parity par : ctx.parities()) {
    const StationaryState p = solve_pair(s, sep, par);
    header.push_back(std::string("R_") + to_string(par));
    std::vector<double> r(c.times.size());
    parallel_for(c.times.size(), c.workers, [&](std::size_t i) {
      r[i] = optimal_squeezing(p, c.times[i], ctx.squeeze_options()).r_min;
    });
    cols.push_back(std::move(r));
  }
  Csv csv(header);
  for (std::size_t i = 0; i < c.times.size(); ++i) {
    std::vector<double> row{c.times[i]};
    for (const auto& col : cols) row.push_back(col[i]);
    csv.row(row);
  }
  ctx.write_csv("fig5_R.csv", csv);
}

const std::map<std::string, std::function<void(Context&)>>& tasks() {
  static const std::map<std::string, std::function<void(Context&)>> t = {
      {"bands", task_bands},     {"soliton", task_soliton},   {"family", task_family},
      {"pair", task_pair},       {"evolve", task_evolve},     {"squeeze", task_squeeze},
      {"correlate", task_correlate}, {"entangle", task_entangle}, {"fig1", task_fig1},
      {"fig2", task_fig2},       {"fig3", task_fig3},         {"fig4", task_fig4},
      {"fig5", task_fig5}};
  return t;
}

}  // namespace

const char* version() { return GAPSOL_VERSION; }

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const InvalidArgument*>(&e)) return 2;
  if (dynamic_cast<const NumericalError*>(&e)) return 3;
  return 1;
}

RunResult run_experiment(const ExperimentConfig& config, std::ostream* log) {
  const auto start = std::chrono::steady_clock::now();
  const auto it = tasks().find(config.task);
  if (it == tasks().end()) throw ConfigError("unknown task '" + config.task + "'");
  Context ctx(config, log);
  ctx.say("gapsol " + std::string(version()) + ": task " + config.task + " -> " +
          config.output_dir.string());
  it->second(ctx);

  RunResult r;
  r.output_dir = config.output_dir;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  r.files = ctx.files;
  json cfg = json::object();
  for (const auto& [k, v] : config.effective) cfg[k] = v;
  const json manifest = {{"tool", "gapsol"},
                         {"version", version()},
                         {"task", config.task},
                         {"preset", config.preset},
                         {"config", cfg},
                         {"wall_time_s", r.wall_seconds},
                         {"files", r.files},
                         {"results", ctx.results}};
  std::ofstream out(config.output_dir / "manifest.json");
  out << manifest.dump(2) << '\n';
  ctx.say("wrote " + std::to_string(r.files.size()) + " files");
  return r;
}

ExperimentConfig config_from_manifest(const std::filesystem::path& manifest) {
  std::ifstream in(manifest);
  if (!in) throw ConfigError("cannot read manifest " + manifest.string());
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed manifest " + manifest.string() + ": " + e.what());
  }
  if (!j.contains("config") || !j["config"].is_object())
    throw ConfigError("manifest " + manifest.string() + " has no config block");
  Assignments a;
  for (const auto& [k, v] : j["config"].items()) a.emplace_back(k, v.get<std::string>());
  return build_config(a, {}, false);
}

}  // namespace gapsol
