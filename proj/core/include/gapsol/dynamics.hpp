#pragma once

#include <span>
#include <vector>

#include "gapsol/grid.hpp"
#include "gapsol/model.hpp"
#include "gapsol/spectral.hpp"
#include "gapsol/stationary.hpp"

namespace gapsol {

/// Second-order Strang step for the mean field: half kinetic, full
/// potential plus nonlinear phase, half kinetic. A negative dt runs the
/// exact inverse step.
class StrangStepper {
 public:
  StrangStepper(const Grid& grid, const Model& model, double dt);

  double dt() const { return dt_; }
  void step(std::span<cplx> psi) const;
  void half_kinetic(std::span<cplx> psi) const;

 private:
  Model model_;
  double dt_;
  Fft fft_;
  std::vector<cplx> half_kin_;
  std::vector<double> potential_;
};

/// Mean-field history. Either explicit checkpoints of a propagated field or,
/// for stationary input, just the profile and mu (no storage).
class Trajectory {
 public:
  const Model& model() const { return model_; }
  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  double dt() const { return dt_; }
  int steps() const { return steps_; }
  double duration() const { return dt_ * steps_; }
  int checkpoint_every() const { return every_; }
  bool is_stationary() const { return stationary_; }
  double stationary_mu() const { return mu_; }
  /// Fields are stored multiplied by exp(i mu_frame t).
  double frame() const { return frame_; }

  const std::vector<double>& times() const { return times_; }
  const std::vector<ComplexField>& checkpoints() const { return checkpoints_; }
  const std::vector<int>& checkpoint_steps() const { return checkpoint_steps_; }

  /// Lab-frame field after n steps, recomputed from the nearest earlier checkpoint.
  ComplexField field_at_step(int n) const;
  /// Lab-frame fields for steps first .. first + count - 1.
  std::vector<ComplexField> segment(int first, int count) const;

  friend Trajectory evolve(const ComplexField&, const Model&, double, double, int, bool);
  friend Trajectory stationary_trajectory(const StationaryState&, double, double);
  friend Trajectory rotating_frame(const Trajectory&, double);

 private:
  Model model_;
  GridPtr grid_;
  double dt_ = 0.0;
  int steps_ = 0;
  int every_ = 1;
  bool stationary_ = false;
  double mu_ = 0.0;
  double frame_ = 0.0;
  ComplexField profile_;
  std::vector<double> times_;
  std::vector<ComplexField> checkpoints_;
  std::vector<int> checkpoint_steps_;
};

/// Propagates for signed duration T. The step count is ceil(|T| / |dt|) and the
/// step is shrunk to fit T exactly. With `guard` set, |dt| must not exceed
/// 0.25 dx^2. Throws NumericalError naming the last healthy time on NaN.
Trajectory evolve(const ComplexField& initial, const Model& model, double T, double dt,
                  int checkpoint_every = 10, bool guard = true);

/// psi exp(-i mu t) on the step grid of evolve(T, dt) without storing fields.
Trajectory stationary_trajectory(const StationaryState& state, double T, double dt);

/// Checkpoints multiplied by exp(i mu t); composes with earlier rotations.
Trajectory rotating_frame(const Trajectory& traj, double mu);

/// Integral of c |psi'|^2 + V |psi|^2 + (g/2) |psi|^4.
double gpe_energy(const ComplexField& psi, const Model& model);

/// Step count and step size used for a duration T with nominal step dt.
std::pair<int, double> step_plan(double T, double dt);

}  // namespace gapsol
