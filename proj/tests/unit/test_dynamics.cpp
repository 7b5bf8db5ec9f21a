#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>

#include "gapsol/dynamics.hpp"
#include "gapsol/spectral.hpp"
#include "oracles.hpp"

using namespace gapsol;
constexpr double kPi = std::numbers::pi;

namespace {
const StationaryState& soliton25() {
  static const StationaryState s = [] {
    auto g = make_grid(32 * kPi, 1024);
    auto e = band_edge_data(Model{}, 1, Edge::low);
    return newton_solve(envelope_seed(2.5, e, g), 2.5, Model{});
  }();
  return s;
}

ComplexField moving_packet(const GridPtr& g) {
  return ComplexField::from_function(g, [](double x) {
    return 0.8 * std::exp(-x * x / 6.0) * std::polar(1.0, 0.7 * x);
  });
}

double max_modulus_change(const ComplexField& a, const ComplexField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(std::abs(a[i]) - std::abs(b[i])));
  return d;
}
}  // namespace

TEST(Evolve, StationarySolitonKeepsModulusAndRotatesPhase) {
  // Strang error on a stationary state is O(dt^2); dt = 1e-4 keeps it below 1e-8.
  const auto& s = soliton25();
  const double T = 1.0;
  auto tr = evolve(s.profile, s.model, T, 1e-4, 1000);
  const auto end = tr.checkpoints().back();
  EXPECT_LT(max_modulus_change(end, s.profile), 1e-8);
  // phase by overlap: <psi, Psi(T)> / P = exp(-i mu T)
  const cplx ov = inner(s.profile, end) / s.norm;
  EXPECT_NEAR(std::abs(ov - std::polar(1.0, -2.5 * T)), 0.0, 1e-8);
}

TEST(Evolve, DefaultStepDeviationIsSecondOrder) {
  const auto& s = soliton25();
  double prev = 0.0;
  for (double dt : {2e-3, 1e-3}) {
    auto tr = evolve(s.profile, s.model, 1.0, dt, 100);
    const double d = max_modulus_change(tr.checkpoints().back(), s.profile);
    if (prev > 0) EXPECT_NEAR(prev / d, 4.0, 0.3);
    prev = d;
  }
}

TEST(Evolve, ZeroFieldStaysZero) {
  auto g = make_grid(8 * kPi, 256);
  auto tr = evolve(ComplexField(g), Model{}, 1.0, 1e-3);
  for (const auto& c : tr.checkpoints()) EXPECT_EQ(c.max_abs(), 0.0);
}

TEST(Evolve, RichardsonSecondOrder) {
  auto g = make_grid(16 * kPi, 512);
  auto psi0 = moving_packet(g);
  auto run = [&](double dt) { return evolve(psi0, Model{}, 1.0, dt, 1000000).checkpoints().back(); };
  const auto a = run(2e-3), b = run(1e-3), c = run(5e-4);
  const double ratio = std::sqrt(norm(a - b) / norm(b - c));
  EXPECT_GT(ratio, 3.5);
  EXPECT_LT(ratio, 4.5);
}

TEST(Evolve, NormAndEnergyConserved) {
  auto g = make_grid(16 * kPi, 512);
  auto psi0 = moving_packet(g);
  auto tr = evolve(psi0, Model{}, 4.0, 1e-3, 100);
  const double p0 = norm(psi0), e0 = gpe_energy(psi0, Model{});
  for (const auto& c : tr.checkpoints()) {
    EXPECT_LE(std::abs(norm(c) - p0) / p0, 1e-8);
    EXPECT_LE(std::abs(gpe_energy(c, Model{}) - e0) / std::abs(e0), 1e-6);
  }
}

TEST(Evolve, TimeReversalReturnsInitial) {
  auto g = make_grid(16 * kPi, 512);
  auto psi0 = moving_packet(g);
  auto fwd = evolve(psi0, Model{}, 2.0, 1e-3, 100);
  auto back = evolve(fwd.checkpoints().back(), Model{}, -2.0, 1e-3, 100);
  EXPECT_LT(max_abs_diff(back.checkpoints().back(), psi0), 1e-6);
}

TEST(Evolve, CheckpointsOnStepGrid) {
  auto g = make_grid(8 * kPi, 256);
  auto tr = evolve(moving_packet(g), Model{}, 0.105, 1e-3, 10);
  EXPECT_EQ(tr.steps(), 105);
  ASSERT_EQ(tr.times().size(), tr.checkpoint_steps().size());
  for (std::size_t i = 0; i < tr.times().size(); ++i) {
    EXPECT_NEAR(tr.times()[i], tr.checkpoint_steps()[i] * tr.dt(), 1e-15);
    if (i > 0) EXPECT_GT(tr.times()[i], tr.times()[i - 1]);
  }
  EXPECT_EQ(tr.times().front(), 0.0);
  EXPECT_EQ(tr.checkpoint_steps().back(), 105);
}

TEST(Evolve, FieldAtStepMatchesDenseRun) {
  auto g = make_grid(8 * kPi, 256);
  auto psi0 = moving_packet(g);
  auto coarse = evolve(psi0, Model{}, 0.1, 1e-3, 10);
  auto dense = evolve(psi0, Model{}, 0.1, 1e-3, 1);
  for (int n : {0, 7, 13, 50, 99, 100}) {
    EXPECT_EQ(max_abs_diff(coarse.field_at_step(n), dense.checkpoints()[n]), 0.0) << n;
  }
  auto seg = coarse.segment(17, 9);
  for (int i = 0; i < 9; ++i) EXPECT_EQ(max_abs_diff(seg[i], dense.checkpoints()[17 + i]), 0.0);
}

TEST(Evolve, StepGuard) {
  auto g = make_grid(8 * kPi, 256);
  const double dx = g->spacing();
  EXPECT_THROW(evolve(moving_packet(g), Model{}, 0.1, 0.3 * dx * dx), InvalidArgument);
  EXPECT_NO_THROW(evolve(moving_packet(g), Model{}, 0.1, 0.3 * dx * dx, 10, false));
}

TEST(Evolve, NanAbortNamesTime) {
  auto g = make_grid(8 * kPi, 256);
  // The split-step map is unitary for any finite g; an infinite coupling is
  // the only way to poison it.
  Model bad{1.0, 4.0, std::numeric_limits<double>::infinity()};
  auto psi0 = ComplexField::from_function(g, [](double x) { return cplx(std::exp(-x * x)); });
  try {
    evolve(psi0, bad, 1.0, 1e-3, 10, false);
    FAIL() << "expected NumericalError";
  } catch (const NumericalError& e) {
    EXPECT_NE(std::string(e.what()).find("last healthy time 0"), std::string::npos) << e.what();
  }
}

TEST(Evolve, StepPlanFitsDuration) {
  auto [n, h] = step_plan(1.0, 3e-3);
  EXPECT_EQ(n, 334);
  EXPECT_NEAR(n * h, 1.0, 1e-15);
  auto [m, k] = step_plan(-1.0, 1e-3);
  EXPECT_EQ(m, 1000);
  EXPECT_LT(k, 0.0);
}

TEST(RotatingFrame, StationarySolitonFreezes) {
  const auto& s = soliton25();
  auto tr = rotating_frame(evolve(s.profile, s.model, 0.5, 1e-4, 500), 2.5);
  for (const auto& c : tr.checkpoints()) EXPECT_LT(max_abs_diff(c, s.profile), 1e-8);
}

TEST(RotatingFrame, ZeroIsIdentityAndInverseRestores) {
  auto g = make_grid(8 * kPi, 256);
  auto tr = evolve(moving_packet(g), Model{}, 0.2, 1e-3, 20);
  auto same = rotating_frame(tr, 0.0);
  auto round = rotating_frame(rotating_frame(tr, 1.7), -1.7);
  for (std::size_t i = 0; i < tr.checkpoints().size(); ++i) {
    EXPECT_EQ(max_abs_diff(same.checkpoints()[i], tr.checkpoints()[i]), 0.0);
    EXPECT_LT(max_abs_diff(round.checkpoints()[i], tr.checkpoints()[i]), 1e-12);
  }
  // lab-frame reconstruction is unaffected by storage frame
  EXPECT_LT(max_abs_diff(round.field_at_step(37), tr.field_at_step(37)), 1e-12);
}

TEST(StationaryTrajectory, ExactPhase) {
  const auto& s = soliton25();
  auto tr = stationary_trajectory(s, 4.0, 1e-3);
  EXPECT_TRUE(tr.is_stationary());
  EXPECT_EQ(tr.steps(), 4000);
  const auto f = tr.field_at_step(4000);
  EXPECT_LT(max_abs_diff(f, s.profile * std::polar(1.0, -2.5 * 4.0)), 1e-12);
}
