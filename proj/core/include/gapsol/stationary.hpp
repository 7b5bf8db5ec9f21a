#pragma once

#include <memory>
#include <vector>

#include "gapsol/bands.hpp"
#include "gapsol/errors.hpp"
#include "gapsol/grid.hpp"
#include "gapsol/model.hpp"

namespace gapsol {

enum class StateKind { single, pair_in_phase, pair_out_of_phase };
enum class Parity { in_phase, out_of_phase };

const char* to_string(StateKind kind);
const char* to_string(Parity parity);

/// Converged real solution of -c psi'' + V psi + g psi^3 = mu psi.
struct StationaryState {
  ComplexField profile;
  double chemical_potential = 0.0;
  Model model;
  double norm = 0.0;
  double residual = 0.0;  // L-infinity of the stationary equation
  int iterations = 0;
  StateKind kind = StateKind::single;
  double center = 0.0;           // soliton site, or pair midpoint
  int separation_periods = 0;    // pairs only

  const Grid& grid() const { return profile.grid(); }
};

/// -c psi'' + V psi + g |psi|^2 psi - mu psi.
ComplexField stationary_operator(const ComplexField& psi, double mu, const Model& model);
double stationary_residual(const ComplexField& psi, double mu, const Model& model);

/// A sech(x / w) Phi(x) centred on the well at `center`, with
/// w = 1/sqrt(2 |m*| |mu - mu0|) and A = sqrt(2 |mu - mu0| / g_eff).
ComplexField envelope_seed(double mu, const BandEdgeData& edge, const GridPtr& grid,
                           double center = 0.0);

struct NewtonOptions {
  int max_iter = 50;
  double tolerance = 1e-10;
  int max_halvings = 6;
  double linear_tolerance = 1e-12;
};

/// Newton iteration with the Jacobian applied spectrally and inverted by
/// preconditioned GMRES. A step that does not lower the residual is halved up
/// to `max_halvings` times before giving up.
StationaryState newton_solve(const ComplexField& seed, double mu, const Model& model,
                             const NewtonOptions& options = {});

struct FamilyPoint {
  double mu = 0.0;
  double norm = 0.0;
  double residual = 0.0;
  std::shared_ptr<const StationaryState> state;
};

struct FamilyBranch {
  std::vector<FamilyPoint> points;
  GapEdges gap;
};

class ContinuationError : public NumericalError {
 public:
  ContinuationError(const std::string& what, FamilyBranch partial, double failed_mu)
      : NumericalError(what), partial_(std::move(partial)), failed_mu_(failed_mu) {}
  const FamilyBranch& partial() const noexcept { return partial_; }
  double failed_mu() const noexcept { return failed_mu_; }

 private:
  FamilyBranch partial_;
  double failed_mu_;
};

/// Natural continuation from mu_start towards mu_end; the first point is
/// seeded from the envelope, later ones from their predecessor. mu_end is
/// always included.
FamilyBranch continue_family(double mu_start, double mu_end, double mu_step,
                             const BandEdgeData& edge, const Model& model, const GridPtr& grid,
                             const NewtonOptions& options = {});

/// Sites of the two constituents: both sit in wells, separation * pi apart.
struct PairGeometry {
  int separation_periods = 0;
  double left = 0.0;
  double right = 0.0;
  double midpoint() const { return 0.5 * (left + right); }
};
PairGeometry pair_geometry(int separation_periods);

/// Translated copies of a single soliton with the pair's signs:
/// psi(x - left) and +-psi(x - right).
std::pair<ComplexField, ComplexField> pair_constituents(const StationaryState& single,
                                                        int separation_periods, Parity parity);

ComplexField bound_pair_seed(const StationaryState& single, int separation_periods,
                             Parity parity);

StationaryState solve_pair(const StationaryState& single, int separation_periods, Parity parity,
                           const NewtonOptions& options = {});

/// Smallest separation among `candidates` for which both parities converge.
int auto_pair_separation(const StationaryState& single, const std::vector<int>& candidates = {1, 2, 3},
                         const NewtonOptions& options = {});

/// Even (in-phase) or odd (out-of-phase) symmetry defect about the midpoint.
double parity_defect(const StationaryState& pair);

/// Integral over sum_{i != j} of c psi_i' conj(psi_j') + V psi_i psi_j
/// + 3 g |psi_i|^2 |psi_j|^2 + 4 g psi_i^3 psi_j.
double interaction_energy(const ComplexField& psi1, const ComplexField& psi2, const Model& model);

}  // namespace gapsol
