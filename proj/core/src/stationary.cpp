#include "gapsol/stationary.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

#include "gapsol/gmres.hpp"
#include "gapsol/spectral.hpp"

namespace gapsol {

namespace {

constexpr double kPi = std::numbers::pi;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Real-space helpers on plain vectors; stationary profiles are real.
struct RealOps {
  const Grid& grid;
  Model model;
  double mu;
  Fft fft;
  std::vector<double> kin;      // c k^2
  std::vector<double> precond;  // 1 / (c k^2 + s (V0/2 + 1))
  std::vector<double> pot;

  RealOps(const Grid& g, const Model& m, double mu_)
      : grid(g), model(m), mu(mu_), fft(g.size()), kin(g.size()), precond(g.size()),
        pot(g.size()) {
    const auto k = g.momenta();
    const double shift = std::copysign(0.5 * m.lattice_depth + 1.0, m.kinetic);
    for (std::size_t i = 0; i < g.size(); ++i) {
      kin[i] = m.kinetic * k[i] * k[i];
      precond[i] = 1.0 / (kin[i] + shift);
      pot[i] = m.potential(g.x(i));
    }
  }

  Eigen::VectorXd multiplier(const Eigen::VectorXd& v, const std::vector<double>& m) const {
    std::vector<cplx> buf(v.begin(), v.end());
    apply_fourier_multiplier(fft, buf, std::span<const double>(m));
    Eigen::VectorXd out(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) out[i] = buf[i].real();
    return out;
  }

  Eigen::VectorXd residual(const Eigen::VectorXd& psi) const {
    Eigen::VectorXd r = multiplier(psi, kin);
    for (Eigen::Index i = 0; i < psi.size(); ++i)
      r[i] += (pot[i] + model.nonlinearity * psi[i] * psi[i] - mu) * psi[i];
    return r;
  }

  Eigen::VectorXd jacobian(const Eigen::VectorXd& psi, const Eigen::VectorXd& v) const {
    Eigen::VectorXd r = multiplier(v, kin);
    for (Eigen::Index i = 0; i < v.size(); ++i)
      r[i] += (pot[i] + 3.0 * model.nonlinearity * psi[i] * psi[i] - mu) * v[i];
    return r;
  }
};

Eigen::VectorXd real_part_aligned(const ComplexField& f) {
  // Remove a global phase so the largest sample is real-positive.
  std::size_t imax = 0;
  for (std::size_t i = 1; i < f.size(); ++i)
    if (std::abs(f[i]) > std::abs(f[imax])) imax = i;
  const cplx phase = f[imax] == 0.0 ? cplx(1.0) : std::conj(f[imax]) / std::abs(f[imax]);
  Eigen::VectorXd out(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) out[i] = (phase * f[i]).real();
  return out;
}

ComplexField to_field(const GridPtr& g, const Eigen::VectorXd& v) {
  std::vector<cplx> out(v.begin(), v.end());
  return ComplexField(g, std::move(out));
}

ComplexField reflect_about_origin(const ComplexField& f) {
  const std::size_t n = f.size();
  std::vector<cplx> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = f[(n - i) % n];
  return ComplexField(f.grid_ptr(), std::move(out));
}

}  // namespace

const char* to_string(StateKind kind) {
  switch (kind) {
    case StateKind::single: return "single";
    case StateKind::pair_in_phase: return "pair_in_phase";
    case StateKind::pair_out_of_phase: return "pair_out_of_phase";
  }
  return "?";
}

const char* to_string(Parity parity) {
  return parity == Parity::in_phase ? "in_phase" : "out_of_phase";
}

ComplexField stationary_operator(const ComplexField& psi, double mu, const Model& model) {
  ComplexField out = second_derivative(psi);
  out *= -model.kinetic;
  const Grid& g = psi.grid();
  for (std::size_t i = 0; i < psi.size(); ++i)
    out[i] += (model.potential(g.x(i)) + model.nonlinearity * std::norm(psi[i]) - mu) * psi[i];
  return out;
}

double stationary_residual(const ComplexField& psi, double mu, const Model& model) {
  return stationary_operator(psi, mu, model).max_abs();
}

ComplexField envelope_seed(double mu, const BandEdgeData& edge, const GridPtr& grid,
                           double center) {
  if (!edge.gap.contains(mu))
    throw InvalidArgument("mu = " + num(mu) + " outside the gap (" + num(edge.gap.low) + ", " +
                          num(edge.gap.high) + ")");
  const double delta = std::abs(mu - edge.edge_energy);
  const double w = 1.0 / std::sqrt(2.0 * std::abs(edge.effective_mass) * delta);
  const double a = std::sqrt(2.0 * delta / edge.effective_nonlinearity);
  const double l = grid->length();
  return ComplexField::from_function(grid, [&](double x) {
    // Periodic distance to the centre keeps the seed smooth across the box edge.
    double d = std::remainder(x - center, l);
    return a / std::cosh(d / w) * edge.bloch.evaluate(x - center);
  });
}

StationaryState newton_solve(const ComplexField& seed, double mu, const Model& model,
                             const NewtonOptions& options) {
  if (!seed.is_finite()) throw InvalidArgument("seed contains non-finite values");
  const GridPtr& grid = seed.grid_ptr();
  const RealOps ops(*grid, model, mu);

  Eigen::VectorXd psi = real_part_aligned(seed);
  Eigen::VectorXd r = ops.residual(psi);
  double res = r.lpNorm<Eigen::Infinity>();
  int it = 0;
  auto apply = [&](const Eigen::VectorXd& v) { return ops.jacobian(psi, v); };
  auto prec = [&](const Eigen::VectorXd& v) { return ops.multiplier(v, ops.precond); };

  while (res > options.tolerance) {
    if (it >= options.max_iter)
      throw ConvergenceError("Newton did not converge at mu = " + num(mu) + " (residual " +
                                 num(res) + ")",
                             res, it);
    ++it;
    Eigen::VectorXd step = Eigen::VectorXd::Zero(psi.size());
    gmres(apply, prec, -r, step, options.linear_tolerance);

    const double before = r.norm();
    double lambda = 1.0;
    bool accepted = false;
    for (int h = 0; h <= options.max_halvings; ++h, lambda *= 0.5) {
      Eigen::VectorXd trial = psi + lambda * step;
      Eigen::VectorXd rt = ops.residual(trial);
      if (rt.allFinite() && rt.norm() < before) {
        psi = std::move(trial);
        r = std::move(rt);
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // At round-off level a full step may not lower the 2-norm; accept if
      // the sup-norm already meets the target.
      Eigen::VectorXd trial = psi + step;
      Eigen::VectorXd rt = ops.residual(trial);
      if (rt.lpNorm<Eigen::Infinity>() <= options.tolerance) {
        psi = std::move(trial);
        r = std::move(rt);
      } else {
        throw ConvergenceError("Newton step rejected after " +
                                   std::to_string(options.max_halvings) +
                                   " halvings at mu = " + num(mu),
                               res, it);
      }
    }
    res = r.lpNorm<Eigen::Infinity>();
  }

  StationaryState s;
  s.profile = to_field(grid, psi);
  s.chemical_potential = mu;
  s.model = model;
  s.norm = norm(s.profile);
  s.iterations = it;
  // Re-check through the independent complex-field operator.
  s.residual = stationary_residual(s.profile, mu, model);
  if (s.profile.max_abs() < 1e-8 || s.norm < 1e-12)
    throw TrivialSolutionError("Newton collapsed to the zero field at mu = " + num(mu));
  if (s.residual > options.tolerance)
    throw ConvergenceError("residual check failed at mu = " + num(mu), s.residual, it);
  return s;
}

FamilyBranch continue_family(double mu_start, double mu_end, double mu_step,
                             const BandEdgeData& edge, const Model& model, const GridPtr& grid,
                             const NewtonOptions& options) {
  if (!(mu_step > 0.0)) throw InvalidArgument("continuation step must be positive");
  if (!(mu_end >= mu_start)) throw InvalidArgument("mu_end must not be below mu_start");
  if (!edge.gap.contains(mu_start) || !edge.gap.contains(mu_end))
    throw InvalidArgument("continuation range [" + num(mu_start) + ", " + num(mu_end) +
                          "] leaves the gap");

  std::vector<double> mus;
  for (int i = 0;; ++i) {
    const double mu = mu_start + i * mu_step;
    if (mu > mu_end + 1e-9 * mu_step) break;
    mus.push_back(mu);
  }
  if (mu_end - mus.back() > 1e-9 * mu_step) mus.push_back(mu_end);

  FamilyBranch branch;
  branch.gap = edge.gap;
  ComplexField seed = envelope_seed(mus.front(), edge, grid);
  for (double mu : mus) {
    try {
      auto st = std::make_shared<StationaryState>(newton_solve(seed, mu, model, options));
      seed = st->profile;
      branch.points.push_back({mu, st->norm, st->residual, std::move(st)});
    } catch (const NumericalError& e) {
      throw ContinuationError("continuation stopped at mu = " + num(mu) + ": " + e.what(),
                              std::move(branch), mu);
    }
  }
  return branch;
}

PairGeometry pair_geometry(int separation_periods) {
  if (separation_periods < 1)
    throw InvalidArgument("pair separation must be at least one lattice period");
  PairGeometry g;
  g.separation_periods = separation_periods;
  g.left = -std::floor(0.5 * separation_periods) * kPi;
  g.right = g.left + separation_periods * kPi;
  return g;
}

std::pair<ComplexField, ComplexField> pair_constituents(const StationaryState& single,
                                                        int separation_periods, Parity parity) {
  const PairGeometry geo = pair_geometry(separation_periods);
  if (geo.separation_periods * kPi >= 0.5 * single.grid().length())
    throw InvalidArgument("pair separation does not fit in the domain");
  ComplexField a = translate(single.profile, geo.left - single.center);
  ComplexField b = translate(single.profile, geo.right - single.center);
  if (parity == Parity::out_of_phase) b *= -1.0;
  return {std::move(a), std::move(b)};
}

ComplexField bound_pair_seed(const StationaryState& single, int separation_periods,
                             Parity parity) {
  auto [a, b] = pair_constituents(single, separation_periods, parity);
  return a + b;
}

StationaryState solve_pair(const StationaryState& single, int separation_periods, Parity parity,
                           const NewtonOptions& options) {
  const ComplexField seed = bound_pair_seed(single, separation_periods, parity);
  StationaryState s = newton_solve(seed, single.chemical_potential, single.model, options);
  // Newton aligns the global phase to the largest sample; restore the seed's sign.
  if (inner(seed, s.profile).real() < 0.0) s.profile *= -1.0;
  s.kind = parity == Parity::in_phase ? StateKind::pair_in_phase : StateKind::pair_out_of_phase;
  s.separation_periods = separation_periods;
  s.center = pair_geometry(separation_periods).midpoint();
  return s;
}

int auto_pair_separation(const StationaryState& single, const std::vector<int>& candidates,
                         const NewtonOptions& options) {
  for (int s : candidates) {
    try {
      solve_pair(single, s, Parity::in_phase, options);
      solve_pair(single, s, Parity::out_of_phase, options);
      return s;
    } catch (const NumericalError&) {
    }
  }
  throw ConvergenceError("no candidate pair separation converged for both parities", 0.0, 0);
}

double parity_defect(const StationaryState& pair) {
  const ComplexField centred = translate(pair.profile, -pair.center);
  ComplexField mirrored = reflect_about_origin(centred);
  if (pair.kind == StateKind::pair_out_of_phase) mirrored *= -1.0;
  return max_abs_diff(centred, mirrored);
}

double interaction_energy(const ComplexField& psi1, const ComplexField& psi2, const Model& model) {
  require_same_grid(psi1, psi2);
  const ComplexField d1 = first_derivative(psi1);
  const ComplexField d2 = first_derivative(psi2);
  const Grid& g = psi1.grid();
  const double gn = model.nonlinearity;
  cplx sum = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const cplx a = psi1[i], b = psi2[i];
    const double v = model.potential(g.x(i));
    // (i, j) = (1, 2) and (2, 1).
    sum += model.kinetic * (d1[i] * std::conj(d2[i]) + d2[i] * std::conj(d1[i]));
    sum += 2.0 * v * a * b;
    sum += 6.0 * gn * std::norm(a) * std::norm(b);
    sum += 4.0 * gn * (a * a * a * b + b * b * b * a);
  }
  return (sum * g.spacing()).real();
}

}  // namespace gapsol
