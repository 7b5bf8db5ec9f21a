#include "gapsol/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <string>

#include "gapsol/errors.hpp"

namespace gapsol {

StrangStepper::StrangStepper(const Grid& grid, const Model& model, double dt)
    : model_(model), dt_(dt), fft_(grid.size()), half_kin_(grid.size()), potential_(grid.size()) {
  const auto k = grid.momenta();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    half_kin_[i] = std::polar(1.0, -0.5 * model.kinetic * k[i] * k[i] * dt);
    potential_[i] = model.potential(grid.x(i));
  }
}

void StrangStepper::half_kinetic(std::span<cplx> psi) const {
  apply_fourier_multiplier(fft_, psi, std::span<const cplx>(half_kin_));
}

void StrangStepper::step(std::span<cplx> psi) const {
  half_kinetic(psi);
  for (std::size_t i = 0; i < psi.size(); ++i) {
    const double phase = (potential_[i] + model_.nonlinearity * std::norm(psi[i])) * dt_;
    psi[i] *= std::polar(1.0, -phase);
  }
  half_kinetic(psi);
}

std::pair<int, double> step_plan(double T, double dt) {
  if (!(std::abs(dt) > 0.0) || !std::isfinite(dt) || !std::isfinite(T))
    throw InvalidArgument("time step must be nonzero and finite");
  if (T == 0.0) return {0, std::abs(dt)};
  const int n = static_cast<int>(std::ceil(std::abs(T) / std::abs(dt) - 1e-9));
  return {n, T / n};
}

Trajectory evolve(const ComplexField& initial, const Model& model, double T, double dt,
                  int checkpoint_every, bool guard) {
  if (checkpoint_every < 1) throw InvalidArgument("checkpoint interval must be >= 1");
  if (!initial.is_finite()) throw InvalidArgument("initial field is not finite");
  const double dx = initial.grid().spacing();
  if (guard && std::abs(dt) > 0.25 * dx * dx * (1.0 + 1e-12))
    throw InvalidArgument("|dt| exceeds the 0.25 dx^2 accuracy guard");
  auto [n, h] = step_plan(T, dt);

  Trajectory tr;
  tr.model_ = model;
  tr.grid_ = initial.grid_ptr();
  tr.dt_ = h;
  tr.steps_ = n;
  tr.every_ = checkpoint_every;

  const StrangStepper stepper(initial.grid(), model, h);
  std::vector<cplx> psi(initial.values().begin(), initial.values().end());
  auto store = [&](int s) {
    tr.checkpoint_steps_.push_back(s);
    tr.times_.push_back(s * h);
    tr.checkpoints_.emplace_back(tr.grid_, psi);
  };
  store(0);
  for (int s = 1; s <= n; ++s) {
    stepper.step(psi);
    if (s % checkpoint_every == 0 || s == n) {
      for (const cplx& z : psi) {
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
          char buf[128];
          std::snprintf(buf, sizeof buf, "mean field became non-finite; last healthy time %.6g",
                        tr.times_.back());
          throw NumericalError(buf);
        }
      }
      store(s);
    }
  }
  return tr;
}

Trajectory stationary_trajectory(const StationaryState& state, double T, double dt) {
  auto [n, h] = step_plan(T, dt);
  Trajectory tr;
  tr.model_ = state.model;
  tr.grid_ = state.profile.grid_ptr();
  tr.dt_ = h;
  tr.steps_ = n;
  tr.every_ = n > 0 ? n : 1;
  tr.stationary_ = true;
  tr.mu_ = state.chemical_potential;
  tr.profile_ = state.profile;
  return tr;
}

Trajectory rotating_frame(const Trajectory& traj, double mu) {
  Trajectory out = traj;
  out.frame_ += mu;
  for (std::size_t c = 0; c < out.checkpoints_.size(); ++c)
    out.checkpoints_[c] *= std::polar(1.0, mu * out.times_[c]);
  return out;
}

ComplexField Trajectory::field_at_step(int n) const { return segment(n, 1).front(); }

std::vector<ComplexField> Trajectory::segment(int first, int count) const {
  if (first < 0 || count < 0 || first + count > steps_ + 1)
    throw InvalidArgument("requested steps lie outside the trajectory");
  std::vector<ComplexField> out;
  out.reserve(count);
  if (stationary_) {
    for (int s = first; s < first + count; ++s)
      out.push_back(profile_ * std::polar(1.0, -mu_ * s * dt_));
    return out;
  }
  if (checkpoints_.empty()) throw InvalidArgument("trajectory has no checkpoints");
  // Latest checkpoint at or before `first`.
  std::size_t c = 0;
  while (c + 1 < checkpoint_steps_.size() && checkpoint_steps_[c + 1] <= first) ++c;
  int s = checkpoint_steps_[c];
  ComplexField lab = checkpoints_[c] * std::polar(1.0, -frame_ * times_[c]);
  std::vector<cplx> psi(lab.values().begin(), lab.values().end());
  const StrangStepper stepper(*grid_, model_, dt_);
  for (; s < first; ++s) stepper.step(psi);
  for (int i = 0; i < count; ++i) {
    if (i > 0) stepper.step(psi);
    out.emplace_back(grid_, psi);
  }
  return out;
}

double gpe_energy(const ComplexField& psi, const Model& model) {
  const ComplexField d = first_derivative(psi);
  const Grid& g = psi.grid();
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double n = std::norm(psi[i]);
    e += model.kinetic * std::norm(d[i]) + model.potential(g.x(i)) * n +
         0.5 * model.nonlinearity * n * n;
  }
  return e * g.spacing();
}

}  // namespace gapsol
