#include "gapsol/linearized.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <string>

#include "gapsol/errors.hpp"
#include "gapsol/spectral.hpp"

namespace gapsol {

namespace {

// Derivative of B = exp(-i (V + g|A|^2) dt) A:
//   dB = alpha dA + beta conj(dA),
//   alpha = e^{-i phi} (1 - i g |A|^2 dt),  beta = -i e^{-i phi} g dt A^2.
struct LocalCoeffs {
  std::vector<cplx> alpha;
  std::vector<cplx> beta;
};

void local_coeffs(std::span<const cplx> a, std::span<const double> pot, double g, double dt,
                  LocalCoeffs& out) {
  const std::size_t n = a.size();
  out.alpha.resize(n);
  out.beta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double dens = std::norm(a[i]);
    const cplx rot = std::polar(1.0, -(pot[i] + g * dens) * dt);
    out.alpha[i] = rot * cplx(1.0, -g * dens * dt);
    out.beta[i] = rot * cplx(0.0, -g * dt) * a[i] * a[i];
  }
}

std::vector<double> potential_samples(const Grid& grid, const Model& model) {
  std::vector<double> v(grid.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = model.potential(grid.x(i));
  return v;
}

// Local coefficients along a trajectory, for steps visited in either order.
class CoefficientSource {
 public:
  explicit CoefficientSource(const Trajectory& traj)
      : traj_(traj), pot_(potential_samples(traj.grid(), traj.model())),
        stepper_(traj.grid(), traj.model(), traj.dt()) {
    if (traj.is_stationary()) {
      const ComplexField psi0 = traj.field_at_step(0);
      std::vector<cplx> a(psi0.values().begin(), psi0.values().end());
      stepper_.half_kinetic(a);
      local_coeffs(a, pot_, traj.model().nonlinearity, traj.dt(), stationary_);
      current_.alpha = stationary_.alpha;
      current_.beta.resize(a.size());
    }
  }

  const LocalCoeffs& at(int n) {
    if (traj_.is_stationary()) {
      // A_n = e^{-i mu t_n} A_0, so beta picks up e^{-2 i mu t_n}.
      const cplx rot = std::polar(1.0, -2.0 * traj_.stationary_mu() * n * traj_.dt());
      for (std::size_t i = 0; i < current_.beta.size(); ++i)
        current_.beta[i] = stationary_.beta[i] * rot;
      return current_;
    }
    if (n < first_ || n >= first_ + static_cast<int>(cache_.size())) load(n);
    return cache_[n - first_];
  }

 private:
  void load(int n) {
    const int every = traj_.checkpoint_every();
    first_ = (n / every) * every;
    const int count = std::min(every, traj_.steps() - first_);
    const auto fields = traj_.segment(first_, count);
    cache_.resize(count);
    for (int i = 0; i < count; ++i) {
      std::vector<cplx> a(fields[i].values().begin(), fields[i].values().end());
      stepper_.half_kinetic(a);
      local_coeffs(a, pot_, traj_.model().nonlinearity, traj_.dt(), cache_[i]);
    }
  }

  const Trajectory& traj_;
  std::vector<double> pot_;
  StrangStepper stepper_;
  LocalCoeffs stationary_;
  LocalCoeffs current_;
  std::vector<LocalCoeffs> cache_;
  int first_ = 0;
};

// exp(-i c k^2 s) for the first component; the second gets the conjugate.
class Kinetic {
 public:
  Kinetic(const Grid& grid, const Model& model, double s) : fft_(grid.size()), m_(grid.size()), mc_(grid.size()) {
    const auto k = grid.momenta();
    for (std::size_t i = 0; i < m_.size(); ++i) {
      m_[i] = std::polar(1.0, -model.kinetic * k[i] * k[i] * s);
      mc_[i] = std::conj(m_[i]);
    }
  }
  void apply(AdjointPair& p) const {
    apply_fourier_multiplier(fft_, p.f.values(), std::span<const cplx>(m_));
    apply_fourier_multiplier(fft_, p.g.values(), std::span<const cplx>(mc_));
  }

 private:
  Fft fft_;
  std::vector<cplx> m_, mc_;
};

enum class Local { forward_fluct, adjoint, inverse_adjoint };

// Pointwise T, T^dagger or eta T eta applied to (f, g).
void apply_local(AdjointPair& p, const LocalCoeffs& c, Local which) {
  auto f = p.f.values();
  auto g = p.g.values();
  for (std::size_t i = 0; i < f.size(); ++i) {
    const cplx a = c.alpha[i], b = c.beta[i];
    const cplx fi = f[i], gi = g[i];
    switch (which) {
      case Local::forward_fluct:
        f[i] = a * fi + b * gi;
        g[i] = std::conj(b) * fi + std::conj(a) * gi;
        break;
      case Local::adjoint:
        f[i] = std::conj(a) * fi + b * gi;
        g[i] = std::conj(b) * fi + a * gi;
        break;
      case Local::inverse_adjoint:
        f[i] = a * fi - b * gi;
        g[i] = -std::conj(b) * fi + std::conj(a) * gi;
        break;
    }
  }
}

void check_finite(const AdjointPair& p) {
  if (!p.f.is_finite() || !p.g.is_finite())
    throw NumericalError("linearized propagation produced non-finite values");
}

int steps_for(const Trajectory& traj, double t) {
  if (t < 0.0) throw InvalidArgument("propagation time must be >= 0");
  if (t == 0.0) return 0;
  const double ratio = t / traj.dt();
  const int m = static_cast<int>(std::llround(ratio));
  if (std::abs(ratio - m) > 1e-6 || m > traj.steps())
    throw InvalidArgument("time " + std::to_string(t) +
                          " is not a stored step of the trajectory");
  return m;
}

void require_grid(const AdjointPair& p, const Grid& grid) {
  if (!(p.f.grid() == grid) || !(p.g.grid() == grid))
    throw InvalidArgument("pair and mean field live on different grids");
}

}  // namespace

AdjointPair AdjointPair::hermitian(const ComplexField& f) { return {f, f.conj()}; }

AdjointPair AdjointPair::zero(const GridPtr& grid) {
  return {ComplexField(grid), ComplexField(grid)};
}

double AdjointPair::hermitian_defect() const { return max_abs_diff(g, f.conj()); }

AdjointPair& AdjointPair::operator+=(const AdjointPair& o) {
  f += o.f;
  g += o.g;
  return *this;
}

AdjointPair& AdjointPair::operator*=(cplx s) {
  f *= s;
  g *= s;
  return *this;
}

cplx pairing(const AdjointPair& w, const AdjointPair& v) { return inner(w.f, v.f) + inner(w.g, v.g); }

AdjointPair linearized_step(const AdjointPair& pair, const ComplexField& psi_n, double dt,
                            const Model& model, Direction direction) {
  require_grid(pair, psi_n.grid());
  const Grid& grid = psi_n.grid();
  const StrangStepper stepper(grid, model, dt);
  std::vector<cplx> a(psi_n.values().begin(), psi_n.values().end());
  stepper.half_kinetic(a);
  LocalCoeffs c;
  local_coeffs(a, potential_samples(grid, model), model.nonlinearity, dt, c);

  AdjointPair p = pair;
  if (direction == Direction::backward) {
    const Kinetic half(grid, model, -0.5 * dt);  // K_h^dagger
    half.apply(p);
    apply_local(p, c, Local::adjoint);
    half.apply(p);
  } else {
    const Kinetic half(grid, model, 0.5 * dt);
    half.apply(p);
    apply_local(p, c, Local::inverse_adjoint);
    half.apply(p);
  }
  check_finite(p);
  return p;
}

AdjointPair fluctuation_step(const AdjointPair& fluct, const ComplexField& psi_n, double dt,
                             const Model& model) {
  require_grid(fluct, psi_n.grid());
  const Grid& grid = psi_n.grid();
  const StrangStepper stepper(grid, model, dt);
  std::vector<cplx> a(psi_n.values().begin(), psi_n.values().end());
  stepper.half_kinetic(a);
  LocalCoeffs c;
  local_coeffs(a, potential_samples(grid, model), model.nonlinearity, dt, c);
  AdjointPair p = fluct;
  const Kinetic half(grid, model, 0.5 * dt);
  half.apply(p);
  apply_local(p, c, Local::forward_fluct);
  half.apply(p);
  check_finite(p);
  return p;
}

AdjointPair backpropagate(const AdjointPair& terminal, const Trajectory& traj, double t) {
  require_grid(terminal, traj.grid());
  const int m = steps_for(traj, t);
  AdjointPair p = terminal;
  if (m == 0) return p;
  const double dt = traj.dt();
  const Kinetic half(traj.grid(), traj.model(), -0.5 * dt);
  const Kinetic full(traj.grid(), traj.model(), -dt);
  CoefficientSource coeffs(traj);
  // S^dagger of S_{m-1} ... S_0, with adjacent half kinetic steps merged.
  half.apply(p);
  for (int n = m - 1; n >= 0; --n) {
    apply_local(p, coeffs.at(n), Local::adjoint);
    if (n > 0) full.apply(p);
  }
  half.apply(p);
  check_finite(p);
  return p;
}

AdjointPair propagate_fluctuation(const AdjointPair& initial, const Trajectory& traj, double t) {
  require_grid(initial, traj.grid());
  const int m = steps_for(traj, t);
  AdjointPair p = initial;
  if (m == 0) return p;
  const double dt = traj.dt();
  const Kinetic half(traj.grid(), traj.model(), 0.5 * dt);
  const Kinetic full(traj.grid(), traj.model(), dt);
  CoefficientSource coeffs(traj);
  half.apply(p);
  for (int n = 0; n < m; ++n) {
    apply_local(p, coeffs.at(n), Local::forward_fluct);
    if (n + 1 < m) full.apply(p);
  }
  half.apply(p);
  check_finite(p);
  return p;
}

Eigen::MatrixXcd rotating_generator(const ComplexField& psi, double mu, const Model& model) {
  const Grid& grid = psi.grid();
  const auto n = static_cast<Eigen::Index>(grid.size());
  // Kinetic matrix column by column: F^{-1} diag(c k^2) F e_j.
  Eigen::MatrixXcd kin(n, n);
  const Fft fft(grid.size());
  std::vector<double> mult(grid.size());
  const auto k = grid.momenta();
  for (std::size_t i = 0; i < mult.size(); ++i) mult[i] = model.kinetic * k[i] * k[i];
  std::vector<cplx> col(grid.size());
  for (Eigen::Index j = 0; j < n; ++j) {
    std::fill(col.begin(), col.end(), cplx(0.0));
    col[j] = 1.0;
    apply_fourier_multiplier(fft, col, std::span<const double>(mult));
    for (Eigen::Index i = 0; i < n; ++i) kin(i, j) = col[i];
  }
  Eigen::MatrixXcd L = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
  L.topLeftCorner(n, n) = kin;
  L.bottomRightCorner(n, n) = -kin;
  for (Eigen::Index i = 0; i < n; ++i) {
    const cplx p = psi[i];
    const double h = model.potential(grid.x(i)) + 2.0 * model.nonlinearity * std::norm(p) - mu;
    L(i, i) += h;
    L(n + i, n + i) -= h;
    L(i, n + i) = model.nonlinearity * p * p;
    L(n + i, i) = -model.nonlinearity * std::conj(p * p);
  }
  return L;
}

Eigen::MatrixXcd dense_propagator(const Trajectory& traj, double t, DenseBackend backend) {
  const Grid& grid = traj.grid();
  if (grid.size() > 256)
    throw InvalidArgument("dense propagator limited to N <= 256, got " + std::to_string(grid.size()));
  const auto n = static_cast<Eigen::Index>(grid.size());
  if (backend == DenseBackend::exponential) {
    if (!traj.is_stationary())
      throw InvalidArgument("exponential backend needs a stationary trajectory");
    const double mu = traj.stationary_mu();
    const Eigen::MatrixXcd L = rotating_generator(traj.field_at_step(0), mu, traj.model());
    Eigen::MatrixXcd S = (cplx(0.0, -t) * L).exp();
    S.topRows(n) *= std::polar(1.0, -mu * t);
    S.bottomRows(n) *= std::polar(1.0, mu * t);
    return S;
  }
  steps_for(traj, t);
  Eigen::MatrixXcd S(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < 2 * n; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(2 * n);
    e[j] = 1.0;
    S.col(j) = to_vector(propagate_fluctuation(from_vector(traj.grid_ptr(), e), traj, t));
  }
  return S;
}

double symplectic_defect(const Eigen::MatrixXcd& S) {
  const Eigen::Index n = S.rows() / 2;
  Eigen::VectorXcd d(2 * n);
  d.head(n).setOnes();
  d.tail(n).setConstant(-1.0);
  const Eigen::MatrixXcd eta = d.asDiagonal();
  return (S.adjoint() * eta * S - eta).cwiseAbs().maxCoeff();
}

double quadrature_variance(const AdjointPair& pair_at_0) { return 0.25 * norm(pair_at_0.f); }

Eigen::VectorXcd to_vector(const AdjointPair& p) {
  const auto n = static_cast<Eigen::Index>(p.f.size());
  Eigen::VectorXcd v(2 * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    v[i] = p.f[i];
    v[n + i] = p.g[i];
  }
  return v;
}

AdjointPair from_vector(const GridPtr& grid, const Eigen::VectorXcd& v) {
  const auto n = static_cast<Eigen::Index>(grid->size());
  if (v.size() != 2 * n) throw InvalidArgument("vector length does not match 2N");
  std::vector<cplx> f(v.data(), v.data() + n), g(v.data() + n, v.data() + 2 * n);
  return {ComplexField(grid, std::move(f)), ComplexField(grid, std::move(g))};
}

}  // namespace gapsol
