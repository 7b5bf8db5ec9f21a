#pragma once

#include <vector>

#include "gapsol/bands.hpp"
#include "gapsol/dynamics.hpp"
#include "gapsol/linearized.hpp"
#include "gapsol/stationary.hpp"

namespace gapsol {

enum class Backend { stepping, dense_exponential };
const char* to_string(Backend b);

struct SqueezingOptions {
  double dt = 1e-3;
  int theta_samples = 64;
  double theta_tolerance = 1e-4;
  Backend backend = Backend::stepping;
  /// Curves whose max - min falls below this are reported flat.
  double flat_tolerance = 1e-9;
};

/// Variance of the quadrature with local oscillator Psi_0(t) e^{i theta} / P
/// carried back to t = 0, against the same quadrature of the unevolved field.
///
/// Back-propagation is complex-linear, so the two Hermitian pairs for
/// theta = 0 and theta = pi/2 fix the whole curve:
/// f_0(theta) = cos(theta) p + sin(theta) q.
class QuadratureCurve {
 public:
  QuadratureCurve(const ComplexField& p, const ComplexField& q, double lo_norm);

  double ratio(double theta) const;
  double variance(double theta) const;  // at t = 0 of the back-propagated pair
  double shot_variance() const { return 0.25 * lo_norm_; }

 private:
  double pp_, qq_, pq_;
  double lo_norm_;  // integral |Psi_L|^2
};

QuadratureCurve quadrature_curve(const Trajectory& traj, double t);
QuadratureCurve quadrature_curve(const StationaryState& state, double t,
                                 const SqueezingOptions& options = {});

/// Local oscillator Psi_0(t) e^{i theta} / P, P the norm at t = 0.
ComplexField local_oscillator(const Trajectory& traj, double t, double theta);

/// One theta, one back-propagation of the Hermitian terminal pair.
double squeezing_ratio(const Trajectory& traj, double t, double theta);
double squeezing_ratio(const StationaryState& state, double t, double theta,
                       const SqueezingOptions& options = {});

struct SqueezingResult {
  double time = 0.0;
  double theta_opt = 0.0;  // radians in [0, pi)
  double r_min = 1.0;
  double r_max = 1.0;
  std::vector<double> thetas;
  std::vector<double> r_of_theta;
  Backend backend = Backend::stepping;
  bool flat = false;
};

/// Samples theta on [0, pi) and refines the minimum by golden section.
SqueezingResult optimal_squeezing(const QuadratureCurve& curve, double t,
                                  const SqueezingOptions& options = {});
SqueezingResult optimal_squeezing(const StationaryState& state, double t,
                                  const SqueezingOptions& options = {});
SqueezingResult optimal_squeezing(const Trajectory& traj, double t,
                                  const SqueezingOptions& options = {});

enum class NlsVariant { lattice_modified, bare };
const char* to_string(NlsVariant v);

/// Lattice-free soliton i Psi_t = D Psi'' + G |Psi|^2 Psi matched to the
/// envelope F of a gap soliton near `edge`.
///
/// lattice_modified: D = 1/(2|m*|), G = g_eff, so its sech is the envelope.
/// bare: D = c and G = g of the lattice model, same width w, amplitude from
/// its own sech relation A^2 = 2 nu / G with nu = D / w^2.
struct NlsReference {
  StationaryState state;  // model: kinetic -D, no lattice, nonlinearity G
  NlsVariant variant = NlsVariant::lattice_modified;
  double dispersion = 0.0;
  double nonlinearity = 0.0;
  double width = 0.0;
  double amplitude = 0.0;
  double analytic_residual = 0.0;  // of the sech before polishing
  double gap_fraction = 0.0;       // |mu - mu0| / gap width
  bool outside_validity = false;   // gap_fraction > 0.3
};

NlsReference nls_reference(const BandEdgeData& edge, double mu, NlsVariant variant,
                           const GridPtr& grid, const Model& lattice_model,
                           const NewtonOptions& options = {});

}  // namespace gapsol
