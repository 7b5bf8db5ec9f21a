#pragma once

#include <Eigen/Dense>

#include "gapsol/dynamics.hpp"
#include "gapsol/grid.hpp"
#include "gapsol/model.hpp"

namespace gapsol {

/// Coefficients (f, g) of the functional integral conj(f) dpsi + conj(g) dpsi^dagger.
/// A measurement is Hermitian when g = conj(f); the homodyne quadrature with
/// local oscillator L is one half of the functional of (L, conj(L)).
struct AdjointPair {
  ComplexField f;
  ComplexField g;

  static AdjointPair hermitian(const ComplexField& f);
  static AdjointPair zero(const GridPtr& grid);

  const Grid& grid() const { return f.grid(); }
  /// max |g - conj(f)|
  double hermitian_defect() const;

  AdjointPair& operator+=(const AdjointPair& o);
  AdjointPair& operator*=(cplx s);
  friend AdjointPair operator+(AdjointPair a, const AdjointPair& b) { return a += b; }
  friend AdjointPair operator*(cplx s, AdjointPair a) { return a *= s; }
};

/// integral conj(w.f) v.f + conj(w.g) v.g
cplx pairing(const AdjointPair& w, const AdjointPair& v);

enum class Direction { forward, backward };

/// One linear step about the mean field psi_n at the start of the step.
///
/// The fluctuation map S_n is the exact derivative of the mean-field Strang
/// step. `backward` applies S_n^dagger, carrying a measurement pair from
/// t + dt to t; `forward` applies its inverse, so the pairing of a
/// measurement pair with a fluctuation moved by S_n is unchanged.
AdjointPair linearized_step(const AdjointPair& pair, const ComplexField& psi_n, double dt,
                            const Model& model, Direction direction);

/// Applies S_n to a fluctuation (u, v); v plays the role of conj(u).
AdjointPair fluctuation_step(const AdjointPair& fluct, const ComplexField& psi_n, double dt,
                             const Model& model);

/// Carries a terminal measurement pair at time t back to time 0 along the
/// trajectory. t must be a whole number of trajectory steps.
AdjointPair backpropagate(const AdjointPair& terminal, const Trajectory& traj, double t);

/// Moves a fluctuation from time 0 to time t.
AdjointPair propagate_fluctuation(const AdjointPair& initial, const Trajectory& traj, double t);

enum class DenseBackend { stepping, exponential };

/// Explicit 2N x 2N fluctuation propagator on nodal values, ordered (u, v).
/// The exponential backend needs a stationary trajectory:
/// S = diag(e^{-i mu t}, e^{i mu t}) exp(-i L t) with the time-independent
/// rotating-frame generator L. N is limited to 256.
Eigen::MatrixXcd dense_propagator(const Trajectory& traj, double t,
                                  DenseBackend backend = DenseBackend::stepping);

/// Rotating-frame generator [[H, g psi^2], [-g conj(psi)^2, -H]] with
/// H = -c d2/dx2 + V + 2 g |psi|^2 - mu.
Eigen::MatrixXcd rotating_generator(const ComplexField& psi, double mu, const Model& model);

/// max |S^dagger eta S - eta| with eta = diag(1, -1).
double symplectic_defect(const Eigen::MatrixXcd& S);

/// Vacuum variance of the quadrature defined by a pair at t = 0:
/// (1/4) integral |f|^2.
double quadrature_variance(const AdjointPair& pair_at_0);

/// Stacks a pair into a 2N vector (f, g).
Eigen::VectorXcd to_vector(const AdjointPair& p);
AdjointPair from_vector(const GridPtr& grid, const Eigen::VectorXcd& v);

}  // namespace gapsol
