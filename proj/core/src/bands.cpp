#include "gapsol/bands.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include "gapsol/errors.hpp"
#include "gapsol/parallel.hpp"

namespace gapsol {

namespace {

constexpr double kPi = std::numbers::pi;

struct Tridiagonal {
  Eigen::VectorXd diag;
  Eigen::VectorXd sub;
};

// H_mm = c (k + 2m)^2 + V0/2, H_{m,m+1} = -V0/4 from sin^2 x = (1 - cos 2x)/2.
Tridiagonal hamiltonian(const Model& model, double k, int cutoff) {
  const int dim = 2 * cutoff + 1;
  Tridiagonal h{Eigen::VectorXd(dim), Eigen::VectorXd::Constant(dim - 1, -0.25 * model.lattice_depth)};
  for (int i = 0; i < dim; ++i) {
    const double q = k + 2.0 * (i - cutoff);
    h.diag[i] = model.kinetic * q * q + 0.5 * model.lattice_depth;
  }
  return h;
}

void check_args(const Model& model, int n_bands, int cutoff) {
  if (!(model.lattice_depth >= 0.0)) throw InvalidArgument("lattice depth must be >= 0");
  if (!(model.kinetic > 0.0)) throw InvalidArgument("band structure needs a positive kinetic coefficient");
  if (n_bands < 1) throw InvalidArgument("need at least one band");
  if (cutoff < 2 * n_bands)
    throw InvalidArgument("plane-wave cutoff " + std::to_string(cutoff) + " below 2 x bands");
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solve(const Model& model, double k, int cutoff,
                                                     int options) {
  const Tridiagonal h = hamiltonian(model, k, cutoff);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(h.diag, h.sub, options);
  if (es.info() != Eigen::Success)
    throw NumericalError("band eigen-solver failed at k = " + std::to_string(k));
  return es;
}

double band_energy(const Model& model, double k, int band, int cutoff) {
  return band_energies_at(model, k, band, cutoff)[band - 1];
}

// Golden-section search for the minimum of f on [a, b].
template <class F>
double golden_min(F&& f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d; d = c; fd = fc;
      c = b - r * (b - a); fc = f(c);
    } else {
      a = c; c = d; fc = fd;
      d = a + r * (b - a); fd = f(d);
    }
  }
  return 0.5 * (a + b);
}

// Refines an extremum of sign * E_band(k) found at sample index i.
std::pair<double, double> refine(const BandStructure& bs, int band, std::size_t i, double sign) {
  Model model;
  model.kinetic = bs.kinetic;
  model.lattice_depth = bs.lattice_depth;
  const auto& ks = bs.quasimomenta;
  const double a = ks[i == 0 ? 0 : i - 1];
  const double b = ks[std::min(i + 1, ks.size() - 1)];
  auto f = [&](double k) { return sign * band_energy(model, k, band, bs.cutoff); };
  double best_k = ks[i];
  double best = f(best_k);
  if (b > a) {
    const double k = golden_min(f, a, b, 1e-10);
    for (double cand : {k, a, b}) {
      const double v = f(cand);
      if (v < best) { best = v; best_k = cand; }
    }
  }
  return {best_k, sign * best};
}

}  // namespace

Eigen::VectorXd band_energies_at(const Model& model, double k, int n_bands, int cutoff) {
  check_args(model, n_bands, cutoff);
  auto es = solve(model, k, cutoff, Eigen::EigenvaluesOnly);
  return es.eigenvalues().head(n_bands);
}

BandStructure band_structure(const Model& model, int k_samples, int n_bands, int cutoff,
                             unsigned workers) {
  check_args(model, n_bands, cutoff);
  if (k_samples < 2) throw InvalidArgument("need at least two quasimomentum samples");
  BandStructure bs;
  bs.lattice_depth = model.lattice_depth;
  bs.kinetic = model.kinetic;
  bs.cutoff = cutoff;
  bs.quasimomenta.resize(k_samples);
  for (int i = 0; i < k_samples; ++i)
    bs.quasimomenta[i] = -1.0 + 2.0 * i / (k_samples - 1);
  bs.energies.resize(k_samples, n_bands);
  parallel_for(static_cast<std::size_t>(k_samples), workers, [&](std::size_t i) {
    // Rows are disjoint, so concurrent writes do not alias.
    bs.energies.row(static_cast<Eigen::Index>(i)) =
        band_energies_at(model, bs.quasimomenta[i], n_bands, cutoff).transpose();
  });
  if (!bs.energies.allFinite()) throw NumericalError("non-finite band energy");
  return bs;
}

GapEdges gap_edges(const BandStructure& bs, int gap_index) {
  if (gap_index < 1 || gap_index + 1 > bs.num_bands())
    throw InvalidArgument("gap " + std::to_string(gap_index) + " needs bands up to " +
                          std::to_string(gap_index + 1));
  Eigen::Index imax = 0, imin = 0;
  bs.energies.col(gap_index - 1).maxCoeff(&imax);
  bs.energies.col(gap_index).minCoeff(&imin);

  GapEdges e;
  std::tie(e.k_low, e.low) = refine(bs, gap_index, static_cast<std::size_t>(imax), -1.0);
  std::tie(e.k_high, e.high) = refine(bs, gap_index + 1, static_cast<std::size_t>(imin), 1.0);
  if (!(e.high - e.low > 1e-12))
    throw NoGapError("gap " + std::to_string(gap_index) + " is closed (bands overlap)");
  return e;
}

BlochState::BlochState(double k, double energy, std::vector<cplx> coefficients)
    : k_(k), energy_(energy), coeffs_(std::move(coefficients)) {}

cplx BlochState::evaluate(double x) const {
  const int m0 = cutoff();
  cplx s = 0.0;
  for (std::size_t i = 0; i < coeffs_.size(); ++i) {
    const double q = k_ + 2.0 * (static_cast<int>(i) - m0);
    s += coeffs_[i] * std::polar(1.0, q * x);
  }
  return s;
}

ComplexField BlochState::sample(const GridPtr& grid) const {
  return ComplexField::from_function(grid, [this](double x) { return evaluate(x); });
}

BlochState bloch_state(const Model& model, double k, int band, int cutoff) {
  check_args(model, band, cutoff);
  auto es = solve(model, k, cutoff, Eigen::ComputeEigenvectors);
  const Eigen::VectorXd v = es.eigenvectors().col(band - 1);
  // Plane waves are orthogonal over a cell, so <|Phi|^2> = sum |c_m|^2.
  std::vector<cplx> c(v.size());
  const double scale = 1.0 / v.norm();
  for (Eigen::Index i = 0; i < v.size(); ++i) c[i] = v[i] * scale;

  BlochState s(k, es.eigenvalues()[band - 1], c);
  const cplx at0 = s.evaluate(0.0);
  const cplx at_half = s.evaluate(0.5 * kPi);
  const cplx ref = std::abs(at0) >= std::abs(at_half) ? at0 : at_half;
  const cplx phase = std::conj(ref) / std::abs(ref);
  for (cplx& z : c) z *= phase;
  return BlochState(k, s.energy(), std::move(c));
}

BandEdgeData::BandEdgeData() : cell_profile(make_grid(kPi, 256)) {}

BandEdgeData band_edge_data(const Model& model, int gap_index, Edge which, int cutoff) {
  const BandStructure bs = band_structure(model, 201, gap_index + 1, cutoff);
  const GapEdges gap = gap_edges(bs, gap_index);

  BandEdgeData d;
  d.gap_index = gap_index;
  d.edge = which;
  d.gap = gap;
  d.band_index = which == Edge::low ? gap_index : gap_index + 1;
  d.quasimomentum = which == Edge::low ? gap.k_low : gap.k_high;
  d.edge_energy = which == Edge::low ? gap.low : gap.high;
  d.bloch = bloch_state(model, d.quasimomentum, d.band_index, cutoff);

  {
    const Tridiagonal h = hamiltonian(model, d.quasimomentum, cutoff);
    const auto& c = d.bloch.coefficients();
    const auto n = c.size();
    double r = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      cplx hc = h.diag[i] * c[i];
      if (i > 0) hc += h.sub[i - 1] * c[i - 1];
      if (i + 1 < n) hc += h.sub[i] * c[i + 1];
      r = std::max(r, std::abs(hc - d.bloch.energy() * c[i]));
    }
    d.residual = r;
  }

  auto curvature = [&](double hk) {
    auto e = [&](double k) { return band_energy(model, k, d.band_index, cutoff); };
    const double k = d.quasimomentum;
    return (-e(k + 2 * hk) + 16 * e(k + hk) - 30 * e(k) + 16 * e(k - hk) - e(k - 2 * hk)) /
           (12 * hk * hk);
  };
  const double c1 = curvature(1e-2);
  const double c2 = curvature(5e-3);
  // A curvature below the finite-difference round-off of E itself is no curvature.
  const double noise = 64 * std::numeric_limits<double>::epsilon() * std::abs(d.edge_energy) /
                       (5e-3 * 5e-3);
  if (std::abs(c2) < std::max(1e-8, noise) || std::abs(c1 - c2) > 0.5 * std::abs(c2))
    throw NumericalError("band curvature vanishes at the edge (flat band)");
  d.effective_mass = 1.0 / c2;
  d.mass_step_change = std::abs(1.0 / c1 - 1.0 / c2);

  d.cell_profile = d.bloch.sample(make_grid(kPi, 256));
  double m2 = 0.0, m4 = 0.0;
  for (const cplx& z : d.cell_profile.values()) {
    const double n = std::norm(z);
    m2 += n;
    m4 += n * n;
  }
  const double cells = static_cast<double>(d.cell_profile.size());
  m2 /= cells;
  m4 /= cells;
  d.effective_nonlinearity = model.nonlinearity * m4 / (m2 * m2);
  return d;
}

}  // namespace gapsol
