#include "gapsol/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "gapsol/errors.hpp"
#include "gapsol/parallel.hpp"
#include "gapsol/spectral.hpp"

namespace gapsol {

namespace {

std::span<const double> coordinates(const Grid& grid, SlotDomain domain) {
  return domain == SlotDomain::position ? grid.positions() : grid.momentum_values();
}

double coordinate_step(const Grid& grid, SlotDomain domain) {
  return domain == SlotDomain::position ? grid.spacing() : grid.momentum_step();
}

// Index j with edges[j] <= s < edges[j+1]; the small shift puts samples that
// sit exactly on an edge into the upper slot despite rounding.
int locate(const std::vector<double>& edges, double s, double eps) {
  const auto it = std::upper_bound(edges.begin(), edges.end(), s + eps);
  const auto j = static_cast<int>(it - edges.begin()) - 1;
  if (j < 0 || j + 1 >= static_cast<int>(edges.size())) return -1;
  return j;
}

}  // namespace

const char* to_string(SlotDomain d) { return d == SlotDomain::position ? "position" : "momentum"; }

const char* to_string(Denominator d) {
  return d == Denominator::full ? "full" : "normally_ordered";
}

SlotPartition::SlotPartition(GridPtr grid, SlotDomain domain, std::vector<double> edges,
                             std::vector<std::vector<double>> masks)
    : grid_(std::move(grid)), domain_(domain), edges_(std::move(edges)), masks_(std::move(masks)) {}

SlotPartition::SlotPartition(const GridPtr& grid, SlotDomain domain, std::vector<double> edges)
    : grid_(grid), domain_(domain), edges_(std::move(edges)) {
  if (!grid_) throw InvalidArgument("partition needs a grid");
  if (edges_.size() < 2) throw InvalidArgument("partition needs at least one slot");
  if (!std::is_sorted(edges_.begin(), edges_.end()) ||
      std::adjacent_find(edges_.begin(), edges_.end()) != edges_.end())
    throw InvalidArgument("slot edges must be strictly increasing");
  const auto s = coordinates(*grid_, domain_);
  const double eps = 1e-9 * coordinate_step(*grid_, domain_);
  masks_.assign(edges_.size() - 1, std::vector<double>(grid_->size(), 0.0));
  for (std::size_t i = 0; i < s.size(); ++i) {
    const int j = locate(edges_, s[i], eps);
    if (j >= 0) masks_[j][i] = 1.0;
  }
}

SlotPartition SlotPartition::position(const GridPtr& grid, double lo, double hi, int bins) {
  if (bins < 1 || !(hi > lo)) throw InvalidArgument("bad position partition");
  std::vector<double> e(bins + 1);
  for (int j = 0; j <= bins; ++j) e[j] = lo + (hi - lo) * j / bins;
  return SlotPartition(grid, SlotDomain::position, std::move(e));
}

SlotPartition SlotPartition::momentum(const GridPtr& grid, double lo, double width, int bins) {
  if (bins < 1 || !(width > 0.0)) throw InvalidArgument("bad momentum partition");
  std::vector<double> e(bins + 1);
  for (int j = 0; j <= bins; ++j) e[j] = lo + width * j;
  return SlotPartition(grid, SlotDomain::momentum, std::move(e));
}

SlotPartition SlotPartition::circular_halves(const GridPtr& grid, double left, double right) {
  if (!(right > left)) throw InvalidArgument("circular halves need left < right");
  const double l = grid->length();
  const double mid = 0.5 * (left + right);
  std::vector<std::vector<double>> masks(2, std::vector<double>(grid->size(), 0.0));
  for (std::size_t i = 0; i < grid->size(); ++i) {
    const double dl = std::abs(std::remainder(grid->x(i) - left, l));
    const double dr = std::abs(std::remainder(grid->x(i) - right, l));
    masks[dl < dr - 1e-12 ? 0 : 1][i] = 1.0;
  }
  return SlotPartition(grid, SlotDomain::position, {mid - 0.5 * l, mid, mid + 0.5 * l},
                       std::move(masks));
}

std::vector<double> SlotPartition::centers() const {
  std::vector<double> c(size());
  for (std::size_t j = 0; j < c.size(); ++j) c[j] = 0.5 * (edges_[j] + edges_[j + 1]);
  return c;
}

std::vector<double> SlotPartition::window() const {
  std::vector<double> w(grid_->size(), 0.0);
  for (const auto& m : masks_)
    for (std::size_t i = 0; i < w.size(); ++i) w[i] += m[i];
  return w;
}

SlotPartition SlotPartition::merged(std::size_t j) const {
  if (j + 1 >= size()) throw InvalidArgument("no slot to merge with");
  std::vector<double> e = edges_;
  e.erase(e.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  auto m = masks_;
  for (std::size_t i = 0; i < m[j].size(); ++i) m[j][i] += m[j + 1][i];
  m.erase(m.begin() + static_cast<std::ptrdiff_t>(j) + 1);
  return SlotPartition(grid_, domain_, std::move(e), std::move(m));
}

int SlotPartition::slot_of(double s) const {
  return locate(edges_, s, 1e-9 * coordinate_step(*grid_, domain_));
}

std::vector<AdjointPair> slot_functionals(const ComplexField& local_oscillator,
                                          const SlotPartition& partition) {
  if (!(local_oscillator.grid() == partition.grid()))
    throw InvalidArgument("partition and local oscillator use different grids");
  std::vector<AdjointPair> out;
  out.reserve(partition.size());
  const ComplexField spectrum = partition.domain() == SlotDomain::momentum
                                    ? to_momentum(local_oscillator)
                                    : ComplexField();
  for (std::size_t j = 0; j < partition.size(); ++j) {
    const auto& m = partition.mask(j);
    if (partition.domain() == SlotDomain::position) {
      ComplexField w = local_oscillator;
      for (std::size_t i = 0; i < w.size(); ++i) w[i] *= m[i];
      out.push_back(AdjointPair::hermitian(w));
    } else {
      ComplexField s = spectrum;
      for (std::size_t i = 0; i < s.size(); ++i) s[i] *= m[i];
      out.push_back(AdjointPair::hermitian(from_momentum(s)));
    }
  }
  return out;
}

SlotCovariance slot_covariance(const Trajectory& traj, double t, double theta,
                               const SlotPartition& partition, unsigned workers) {
  // Same construction as the squeezing local oscillator.
  const int m = static_cast<int>(std::llround(t / traj.dt()));
  const double p = norm(traj.field_at_step(0));
  const ComplexField lo = traj.field_at_step(m) * (std::polar(1.0, theta) / p);
  const auto w = slot_functionals(lo, partition);
  std::vector<ComplexField> back(w.size());
  parallel_for(w.size(), workers,
               [&](std::size_t j) { back[j] = backpropagate(w[j], traj, t).f; });
  const auto b = static_cast<Eigen::Index>(w.size());
  SlotCovariance c{Eigen::MatrixXd(b, b), Eigen::MatrixXd(b, b)};
  for (Eigen::Index i = 0; i < b; ++i)
    for (Eigen::Index j = i; j < b; ++j) {
      c.full(i, j) = c.full(j, i) = inner(back[i], back[j]).real();
      c.shot(i, j) = c.shot(j, i) = inner(w[i].f, w[j].f).real();
    }
  return c;
}

CorrelationMatrix correlation_matrix(const SlotCovariance& cov, const SlotPartition& partition,
                                     double t, double theta, Denominator denominator) {
  CorrelationMatrix c;
  c.numerator = cov.full - cov.shot;
  c.variances = denominator == Denominator::full ? Eigen::VectorXd(cov.full.diagonal())
                                                 : Eigen::VectorXd(c.numerator.diagonal());
  const Eigen::Index b = c.numerator.rows();
  c.values.resize(b, b);
  for (Eigen::Index i = 0; i < b; ++i)
    for (Eigen::Index j = 0; j < b; ++j) {
      const double den = std::sqrt(std::abs(c.variances[i] * c.variances[j]));
      c.values(i, j) = den > 0.0 ? c.numerator(i, j) / den : 0.0;
    }
  c.values = 0.5 * (c.values + c.values.transpose()).eval();
  c.centers = partition.centers();
  c.domain = partition.domain();
  c.theta = theta;
  c.time = t;
  c.denominator = denominator;
  return c;
}

CorrelationMatrix correlation_matrix(const Trajectory& traj, double t, double theta,
                                     const SlotPartition& partition, Denominator denominator,
                                     unsigned workers) {
  return correlation_matrix(slot_covariance(traj, t, theta, partition, workers), partition, t,
                            theta, denominator);
}

BraggReport bragg_peak_report(const CorrelationMatrix& c, const SlotPartition& partition,
                              double factor, int max_order) {
  if (c.domain != SlotDomain::momentum)
    throw InvalidArgument("Bragg report needs a momentum-domain matrix");
  const auto& e = partition.edges();
  for (std::size_t j = 0; j + 1 < e.size(); ++j)
    if (e[j + 1] - e[j] > 1.0) throw InvalidArgument("momentum bins too coarse for Bragg peaks");

  BraggReport r;
  r.factor = factor;
  const Eigen::Index b = c.values.rows();
  std::vector<double> off;
  for (Eigen::Index i = 0; i < b; ++i)
    for (Eigen::Index j = 0; j < b; ++j)
      if (i != j) off.push_back(std::abs(c.values(i, j)));
  if (!off.empty()) {
    std::nth_element(off.begin(), off.begin() + static_cast<std::ptrdiff_t>(off.size() / 2), off.end());
    r.offdiagonal_median = off[off.size() / 2];
  }
  if (c.values.cwiseAbs().maxCoeff() == 0.0) return r;

  std::vector<std::pair<double, int>> odd;
  for (int o = -max_order; o <= max_order; o += 2) {
    const int s = partition.slot_of(o);
    if (s >= 0) odd.emplace_back(o, s);
  }
  for (const auto& [ki, si] : odd)
    for (const auto& [kj, sj] : odd) {
      BraggEntry en{ki, kj, si, sj, c.values(si, sj), false};
      en.exceeds = std::abs(en.value) > factor * r.offdiagonal_median;
      r.entries.push_back(en);
    }
  return r;
}

std::vector<C12Point> intersoliton_correlation(const StationaryState& pair,
                                               const std::vector<double>& times,
                                               const IntersolitonOptions& options) {
  if (pair.kind == StateKind::single) throw InvalidArgument("C12 needs a bound pair state");
  const PairGeometry geo = pair_geometry(pair.separation_periods);
  const auto partition =
      SlotPartition::circular_halves(pair.profile.grid_ptr(), geo.left, geo.right);
  std::vector<C12Point> out(times.size());
  parallel_for(times.size(), options.workers, [&](std::size_t i) {
    const double t = times[i];
    const Trajectory traj = stationary_trajectory(pair, t, options.dt);
    const auto c = correlation_matrix(traj, t, 0.0, partition, options.denominator, 1);
    out[i] = {t, c.values(0, 1)};
  });
  return out;
}

double half_extremum_time(const std::vector<C12Point>& series) {
  if (series.empty()) throw InvalidArgument("empty C12 series");
  double peak = 0.0;
  for (const auto& p : series) peak = std::max(peak, std::abs(p.c12));
  if (peak == 0.0) return series.front().time;
  const double half = 0.5 * peak;
  for (std::size_t i = 0; i < series.size(); ++i) {
    const double v = std::abs(series[i].c12);
    if (v >= half) {
      if (i == 0) return series[0].time;
      const double v0 = std::abs(series[i - 1].c12);
      const double f = (half - v0) / (v - v0);
      return series[i - 1].time + f * (series[i].time - series[i - 1].time);
    }
  }
  return series.back().time;
}

}  // namespace gapsol
