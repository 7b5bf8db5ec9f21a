#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "gapsol/dynamics.hpp"
#include "gapsol/linearized.hpp"
#include "gapsol/stationary.hpp"

namespace gapsol {

enum class SlotDomain { position, momentum };
const char* to_string(SlotDomain d);

/// Disjoint slots over a window in x or k. Masks are per grid point; for the
/// momentum domain they follow momentum_values() (ascending k).
class SlotPartition {
 public:
  SlotPartition(const GridPtr& grid, SlotDomain domain, std::vector<double> edges);

  /// `bins` equal slots over [lo, hi).
  static SlotPartition position(const GridPtr& grid, double lo, double hi, int bins);
  /// `bins` slots of `width` over [lo, lo + bins * width).
  static SlotPartition momentum(const GridPtr& grid, double lo, double width, int bins);
  /// Two slots: points nearer `left` than `right` on the periodic domain and the rest.
  static SlotPartition circular_halves(const GridPtr& grid, double left, double right);

  SlotDomain domain() const { return domain_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return masks_.size(); }
  const std::vector<double>& edges() const { return edges_; }
  std::vector<double> centers() const;
  const std::vector<double>& mask(std::size_t j) const { return masks_[j]; }
  /// Indicator of the union of all slots.
  std::vector<double> window() const;
  /// Same partition with slots j and j + 1 joined.
  SlotPartition merged(std::size_t j) const;
  /// Index of the slot containing coordinate s, or -1.
  int slot_of(double s) const;

 private:
  SlotPartition(GridPtr grid, SlotDomain domain, std::vector<double> edges,
                std::vector<std::vector<double>> masks);

  GridPtr grid_;
  SlotDomain domain_;
  std::vector<double> edges_;
  std::vector<std::vector<double>> masks_;
};

/// Terminal Hermitian pairs (w_j, conj(w_j)) with w_j = chi_j Psi_L, or the
/// momentum-windowed F^{-1} chi_j F Psi_L.
std::vector<AdjointPair> slot_functionals(const ComplexField& local_oscillator,
                                          const SlotPartition& partition);

/// Quadrature second moments per slot pair, up to a common factor 1/4:
/// full_ij = Re integral conj(p_i) p_j of the back-propagated pairs and
/// shot_ij = Re integral conj(w_i) w_j of the unevolved ones.
struct SlotCovariance {
  Eigen::MatrixXd full;
  Eigen::MatrixXd shot;
};

SlotCovariance slot_covariance(const Trajectory& traj, double t, double theta,
                               const SlotPartition& partition, unsigned workers = 0);

enum class Denominator { full, normally_ordered };
const char* to_string(Denominator d);

struct CorrelationMatrix {
  Eigen::MatrixXd values;
  Eigen::MatrixXd numerator;  // full - shot
  Eigen::VectorXd variances;  // per slot, in the chosen ordering
  std::vector<double> centers;
  SlotDomain domain = SlotDomain::position;
  double theta = 0.0;
  double time = 0.0;
  Denominator denominator = Denominator::full;
};

/// C_ij = (full_ij - shot_ij) / sqrt(Var_i Var_j), Var = full_jj, or
/// full_jj - shot_jj when normally ordered. Symmetrized.
CorrelationMatrix correlation_matrix(const SlotCovariance& cov, const SlotPartition& partition,
                                     double t, double theta,
                                     Denominator denominator = Denominator::full);
CorrelationMatrix correlation_matrix(const Trajectory& traj, double t, double theta,
                                     const SlotPartition& partition,
                                     Denominator denominator = Denominator::full,
                                     unsigned workers = 0);

struct BraggEntry {
  double k_i = 0.0;
  double k_j = 0.0;
  int slot_i = -1;
  int slot_j = -1;
  double value = 0.0;
  bool exceeds = false;
};

struct BraggReport {
  std::vector<BraggEntry> entries;
  double offdiagonal_median = 0.0;
  double factor = 0.0;
};

/// Entries at bins holding odd integers up to `max_order` (pairs k_i = +-k_j
/// included). `exceeds` marks |C| above factor x median |C_ij|, i != j.
/// Throws InvalidArgument for a position-domain matrix or bins wider than 1.
BraggReport bragg_peak_report(const CorrelationMatrix& c, const SlotPartition& partition,
                              double factor = 3.0, int max_order = 5);

struct C12Point {
  double time = 0.0;
  double c12 = 0.0;
};

struct IntersolitonOptions {
  double dt = 1e-3;
  Denominator denominator = Denominator::full;
  unsigned workers = 0;
};

/// Theta = 0 two-slot correlation for a bound pair split at its midpoint.
std::vector<C12Point> intersoliton_correlation(const StationaryState& pair,
                                               const std::vector<double>& times,
                                               const IntersolitonOptions& options = {});

/// Time at which |C12| first reaches half of its largest sampled magnitude,
/// interpolated linearly between samples.
double half_extremum_time(const std::vector<C12Point>& series);

}  // namespace gapsol
