#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gapsol/grid.hpp"
#include "gapsol/model.hpp"

namespace gapsol {

/// E_n(k) of -c d2/dx2 + V0 sin^2 x over the zone [-1, 1].
struct BandStructure {
  double lattice_depth = 0.0;
  double kinetic = 1.0;
  int cutoff = 0;  // plane waves k + 2m, |m| <= cutoff
  std::vector<double> quasimomenta;
  Eigen::MatrixXd energies;  // row per quasimomentum, column per band

  int num_bands() const { return static_cast<int>(energies.cols()); }
};

/// Lowest `n_bands` eigenvalues at quasimomentum k.
Eigen::VectorXd band_energies_at(const Model& model, double k, int n_bands, int cutoff);

/// Plane-wave diagonalization at `k_samples` evenly spaced quasimomenta.
/// Rows are independent and are spread over `workers` threads (0 = all cores).
BandStructure band_structure(const Model& model, int k_samples = 201, int n_bands = 4,
                             int cutoff = 32, unsigned workers = 0);

struct GapEdges {
  double low = 0.0;   // max over band n
  double high = 0.0;  // min over band n + 1
  double k_low = 0.0;
  double k_high = 0.0;

  double width() const { return high - low; }
  bool contains(double mu, double margin = 0.0) const {
    return mu > low + margin && mu < high - margin;
  }
};

/// Edges of the gap above band `gap_index` (1-based), refined by golden
/// section in k. Throws NoGapError when the bands overlap.
GapEdges gap_edges(const BandStructure& bs, int gap_index);

/// One Bloch eigenfunction exp(ikx) u(x) stored by its plane-wave coefficients.
class BlochState {
 public:
  BlochState() = default;
  BlochState(double k, double energy, std::vector<cplx> coefficients);

  double quasimomentum() const { return k_; }
  double energy() const { return energy_; }
  int cutoff() const { return static_cast<int>(coeffs_.size() / 2); }
  const std::vector<cplx>& coefficients() const { return coeffs_; }

  cplx evaluate(double x) const;
  ComplexField sample(const GridPtr& grid) const;

 private:
  double k_ = 0.0;
  double energy_ = 0.0;
  std::vector<cplx> coeffs_;
};

/// Eigenstate `band` (1-based) at k, scaled to unit cell-averaged density and
/// made real-positive at x = 0 or x = pi/2, whichever has the larger modulus.
BlochState bloch_state(const Model& model, double k, int band, int cutoff = 32);

enum class Edge { low, high };

struct BandEdgeData {
  int gap_index = 1;
  Edge edge = Edge::low;
  int band_index = 1;
  double quasimomentum = 0.0;
  double edge_energy = 0.0;
  BlochState bloch;
  ComplexField cell_profile;  // Bloch state on make_grid(pi, 256)
  double effective_mass = 0.0;
  double effective_nonlinearity = 0.0;
  GapEdges gap;
  double residual = 0.0;  // eigenproblem residual in plane-wave space
  double mass_step_change = 0.0;  // |m*(h) - m*(h/2)|

  BandEdgeData();
};

/// Edge energy, Bloch state, m* = 1/E''(k) and g_eff = g <|Phi|^4>/<|Phi|^2>^2.
BandEdgeData band_edge_data(const Model& model, int gap_index, Edge which, int cutoff = 32);

}  // namespace gapsol
