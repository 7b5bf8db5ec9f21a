#include "gapsol/squeezing.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "gapsol/errors.hpp"
#include "gapsol/spectral.hpp"

namespace gapsol {

namespace {

constexpr double kPi = std::numbers::pi;

AdjointPair back_to_zero(const AdjointPair& terminal, const Trajectory& traj, double t,
                         Backend backend) {
  if (backend == Backend::stepping) return backpropagate(terminal, traj, t);
  const Eigen::MatrixXcd S = dense_propagator(traj, t, DenseBackend::exponential);
  return from_vector(traj.grid_ptr(), S.adjoint() * to_vector(terminal));
}

QuadratureCurve curve_with(const Trajectory& traj, double t, Backend backend) {
  const ComplexField lo = local_oscillator(traj, t, 0.0);
  const AdjointPair p = back_to_zero(AdjointPair::hermitian(lo), traj, t, backend);
  const AdjointPair q =
      back_to_zero(AdjointPair::hermitian(lo * cplx(0.0, 1.0)), traj, t, backend);
  return QuadratureCurve(p.f, q.f, norm(lo));
}

Trajectory trajectory_for(const StationaryState& state, double t, double dt) {
  return stationary_trajectory(state, t, dt);
}

}  // namespace

const char* to_string(Backend b) {
  return b == Backend::stepping ? "stepping" : "dense_exponential";
}

const char* to_string(NlsVariant v) {
  return v == NlsVariant::lattice_modified ? "lattice_modified" : "bare";
}

QuadratureCurve::QuadratureCurve(const ComplexField& p, const ComplexField& q, double lo_norm)
    : pp_(norm(p)), qq_(norm(q)), pq_(inner(p, q).real()), lo_norm_(lo_norm) {
  if (!(lo_norm > 0.0)) throw InvalidArgument("local oscillator has zero norm");
}

double QuadratureCurve::variance(double theta) const {
  const double c = std::cos(theta), s = std::sin(theta);
  return 0.25 * (c * c * pp_ + s * s * qq_ + 2.0 * c * s * pq_);
}

double QuadratureCurve::ratio(double theta) const { return variance(theta) / shot_variance(); }

ComplexField local_oscillator(const Trajectory& traj, double t, double theta) {
  const int m = static_cast<int>(std::llround(t / traj.dt()));
  if (t < 0.0 || std::abs(t / traj.dt() - m) > 1e-6 || m > traj.steps())
    throw InvalidArgument("local oscillator time is not a trajectory step");
  const double p = norm(traj.field_at_step(0));
  if (!(p > 0.0)) throw InvalidArgument("mean field has zero norm");
  return traj.field_at_step(m) * (std::polar(1.0, theta) / p);
}

QuadratureCurve quadrature_curve(const Trajectory& traj, double t) {
  return curve_with(traj, t, Backend::stepping);
}

QuadratureCurve quadrature_curve(const StationaryState& state, double t,
                                 const SqueezingOptions& options) {
  return curve_with(trajectory_for(state, t, options.dt), t, options.backend);
}

double squeezing_ratio(const Trajectory& traj, double t, double theta) {
  const ComplexField lo = local_oscillator(traj, t, theta);
  const AdjointPair p0 = backpropagate(AdjointPair::hermitian(lo), traj, t);
  return quadrature_variance(p0) / (0.25 * norm(lo));
}

double squeezing_ratio(const StationaryState& state, double t, double theta,
                       const SqueezingOptions& options) {
  const Trajectory traj = trajectory_for(state, t, options.dt);
  if (options.backend == Backend::stepping) return squeezing_ratio(traj, t, theta);
  const ComplexField lo = local_oscillator(traj, t, theta);
  const AdjointPair p0 = back_to_zero(AdjointPair::hermitian(lo), traj, t, options.backend);
  return quadrature_variance(p0) / (0.25 * norm(lo));
}

SqueezingResult optimal_squeezing(const QuadratureCurve& curve, double t,
                                  const SqueezingOptions& options) {
  if (options.theta_samples < 8) throw InvalidArgument("need at least 8 theta samples");
  SqueezingResult r;
  r.time = t;
  r.backend = options.backend;
  const int n = options.theta_samples;
  r.thetas.resize(n);
  r.r_of_theta.resize(n);
  int imin = 0;
  for (int i = 0; i < n; ++i) {
    r.thetas[i] = kPi * i / n;
    r.r_of_theta[i] = curve.ratio(r.thetas[i]);
    if (r.r_of_theta[i] < r.r_of_theta[imin]) imin = i;
  }
  r.r_max = *std::max_element(r.r_of_theta.begin(), r.r_of_theta.end());
  r.flat = r.r_max - r.r_of_theta[imin] <= options.flat_tolerance;

  // Golden section on the bracket around the best sample; R has period pi.
  const double h = kPi / n;
  double a = r.thetas[imin] - h, b = r.thetas[imin] + h;
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = curve.ratio(c), fd = curve.ratio(d);
  while (b - a > options.theta_tolerance) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - g * (b - a); fc = curve.ratio(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + g * (b - a); fd = curve.ratio(d);
    }
  }
  double theta = 0.5 * (a + b);
  double best = curve.ratio(theta);
  if (r.r_of_theta[imin] < best) {
    theta = r.thetas[imin];
    best = r.r_of_theta[imin];
  }
  theta = std::fmod(theta, kPi);
  if (theta < 0.0) theta += kPi;
  r.theta_opt = theta;
  r.r_min = best;
  return r;
}

SqueezingResult optimal_squeezing(const StationaryState& state, double t,
                                  const SqueezingOptions& options) {
  return optimal_squeezing(quadrature_curve(state, t, options), t, options);
}

SqueezingResult optimal_squeezing(const Trajectory& traj, double t,
                                  const SqueezingOptions& options) {
  SqueezingOptions o = options;
  o.backend = Backend::stepping;
  return optimal_squeezing(quadrature_curve(traj, t), t, o);
}

NlsReference nls_reference(const BandEdgeData& edge, double mu, NlsVariant variant,
                           const GridPtr& grid, const Model& lattice_model,
                           const NewtonOptions& options) {
  if (!edge.gap.contains(mu)) throw InvalidArgument("mu outside the gap");
  const double delta = std::abs(mu - edge.edge_energy);
  const double w = 1.0 / std::sqrt(2.0 * std::abs(edge.effective_mass) * delta);

  NlsReference ref;
  ref.variant = variant;
  ref.width = w;
  ref.gap_fraction = delta / edge.gap.width();
  ref.outside_validity = ref.gap_fraction > 0.3;
  if (variant == NlsVariant::lattice_modified) {
    ref.dispersion = 1.0 / (2.0 * std::abs(edge.effective_mass));
    ref.nonlinearity = edge.effective_nonlinearity;
  } else {
    ref.dispersion = lattice_model.kinetic;
    ref.nonlinearity = lattice_model.nonlinearity;
  }
  const double nu = ref.dispersion / (w * w);
  ref.amplitude = std::sqrt(2.0 * nu / ref.nonlinearity);

  Model m;
  m.kinetic = -ref.dispersion;
  m.lattice_depth = 0.0;
  m.nonlinearity = ref.nonlinearity;
  const double l = grid->length();
  const ComplexField sech = ComplexField::from_function(grid, [&](double x) {
    return cplx(ref.amplitude / std::cosh(std::remainder(x, l) / w));
  });
  ref.analytic_residual = stationary_residual(sech, nu, m);
  // On the periodic box the sech tails wrap around; polish onto the grid.
  ref.state = newton_solve(sech, nu, m, options);
  return ref;
}

}  // namespace gapsol
