#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "gapsol/bands.hpp"
#include "gapsol/errors.hpp"

using namespace gapsol;
constexpr double kPi = std::numbers::pi;

TEST(Bands, FreeParticleFoldedBands) {
  Model m{1.0, 0.0, 1.0};
  auto bs = band_structure(m, 21, 4, 16);
  for (std::size_t r = 0; r < bs.quasimomenta.size(); ++r) {
    const double k = bs.quasimomenta[r];
    std::vector<double> want;
    for (int j = -4; j <= 4; ++j) want.push_back((k + 2 * j) * (k + 2 * j));
    std::sort(want.begin(), want.end());
    for (int n = 0; n < 4; ++n) EXPECT_NEAR(bs.energies(r, n), want[n], 1e-12);
  }
}

TEST(Bands, FreeParticleHasNoGap) {
  Model m{1.0, 0.0, 1.0};
  auto bs = band_structure(m, 51, 4, 16);
  EXPECT_THROW(gap_edges(bs, 1), NoGapError);
  EXPECT_THROW(gap_edges(bs, 2), NoGapError);
}

TEST(Bands, DefaultGapBracketsSolitonPoints) {
  auto gap = gap_edges(band_structure(Model{}), 1);
  EXPECT_NEAR(gap.low, 1.8897511830, 1e-9);
  EXPECT_NEAR(gap.high, 3.8591080725, 1e-9);
  for (double mu : {1.91, 3.0, 3.85}) EXPECT_TRUE(gap.contains(mu));
  EXPECT_NEAR(std::abs(gap.k_low), 1.0, 1e-9);
  EXPECT_NEAR(std::abs(gap.k_high), 1.0, 1e-9);
}

TEST(Bands, CutoffConvergence) {
  auto a = gap_edges(band_structure(Model{}, 201, 4, 16), 1);
  auto b = gap_edges(band_structure(Model{}, 201, 4, 32), 1);
  EXPECT_NEAR(a.low, b.low, 1e-9);
  EXPECT_NEAR(a.high, b.high, 1e-9);
}

TEST(Bands, SymmetricInQuasimomentum) {
  auto bs = band_structure(Model{}, 201, 4, 32);
  const int n = static_cast<int>(bs.quasimomenta.size());
  for (int r = 0; r < n; ++r)
    for (int b = 0; b < 4; ++b) EXPECT_NEAR(bs.energies(r, b), bs.energies(n - 1 - r, b), 1e-12);
}

TEST(Bands, OrderedAtEveryK) {
  auto bs = band_structure(Model{1.0, 7.0, 1.0}, 101, 6, 32);
  for (Eigen::Index r = 0; r < bs.energies.rows(); ++r)
    for (int b = 1; b < 6; ++b) EXPECT_LE(bs.energies(r, b - 1), bs.energies(r, b));
}

TEST(Bands, HarmonicWellBottom) {
  for (double c : {1.0, 0.5}) {
    Model m{c, 40.0, 1.0};
    const double e = band_energies_at(m, 0.5, 1, 32)(0);
    const double oracle = std::sqrt(c * 40.0);
    EXPECT_LT(std::abs(e - oracle) / oracle, 0.05) << "c=" << c << " E=" << e;
  }
}

TEST(Bands, ParallelMatchesSerial) {
  auto a = band_structure(Model{}, 101, 4, 32, 1);
  auto b = band_structure(Model{}, 101, 4, 32, 4);
  EXPECT_EQ((a.energies - b.energies).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Bands, RejectsBadArguments) {
  EXPECT_THROW(band_structure(Model{1.0, -1.0, 1.0}), InvalidArgument);
  EXPECT_THROW(band_structure(Model{}, 201, 4, 3), InvalidArgument);
}

TEST(BandEdge, LowerEdgeIsAnomalous) {
  auto e = band_edge_data(Model{}, 1, Edge::low);
  EXPECT_LT(e.effective_mass, 0.0);
  EXPECT_NEAR(e.effective_mass, -0.426963, 1e-5);
  EXPECT_NEAR(e.edge_energy, e.gap.low, 1e-12);
  EXPECT_LT(e.residual, 1e-10);
  EXPECT_LT(e.mass_step_change, 1e-6);
}

TEST(BandEdge, UpperEdgeIsNormal) {
  auto e = band_edge_data(Model{}, 1, Edge::high);
  EXPECT_GT(e.effective_mass, 0.0);
  EXPECT_NEAR(e.edge_energy, e.gap.high, 1e-12);
}

TEST(BandEdge, EffectiveNonlinearityCauchySchwarz) {
  for (double v0 : {0.5, 4.0, 10.0}) {
    auto e = band_edge_data(Model{1.0, v0, 1.0}, 1, Edge::low);
    EXPECT_GE(e.effective_nonlinearity, 1.0 - 1e-12) << v0;
  }
  auto e = band_edge_data(Model{1.0, 4.0, 2.0}, 1, Edge::low);
  EXPECT_NEAR(e.effective_nonlinearity, 2 * 1.754034, 2e-5);
}

TEST(BandEdge, BlochStateRealAndUnitDensity) {
  auto e = band_edge_data(Model{}, 1, Edge::low);
  const auto& p = e.cell_profile;
  double dens = 0.0, imag = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    dens += std::norm(p[i]);
    imag = std::max(imag, std::abs(p[i].imag()));
  }
  EXPECT_NEAR(dens / p.size(), 1.0, 1e-10);
  EXPECT_LT(imag, 1e-10);
  // lower edge of the first gap is cos-like: maximal in the wells
  EXPECT_GT(e.bloch.evaluate(0.0).real(), 0.0);
  EXPECT_LT(std::abs(e.bloch.evaluate(kPi / 2)), 1e-10);
}

TEST(BandEdge, BlochStateIsEigenfunction) {
  const Model m{};
  auto e = band_edge_data(m, 1, Edge::high);
  // -c u'' + V u = E u checked by central differences at a few points
  const double h = 1e-4;
  for (double x : {0.1, 0.7, 1.3, 2.9}) {
    const cplx u = e.bloch.evaluate(x);
    const cplx d2 = (e.bloch.evaluate(x + h) - 2.0 * u + e.bloch.evaluate(x - h)) / (h * h);
    EXPECT_LT(std::abs(-m.kinetic * d2 + m.potential(x) * u - e.edge_energy * u), 1e-5);
  }
}

TEST(BandEdge, NearlyFreeLimit) {
  // shallow lattice: edge state tends to cos x (the e^{+-ix} superposition)
  double prev_overlap = 0.0;
  for (double v0 : {0.4, 0.1, 0.025}) {
    auto e = band_edge_data(Model{1.0, v0, 1.0}, 1, Edge::low);
    const auto& p = e.cell_profile;
    cplx ov = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i)
      ov += std::sqrt(2.0) * std::cos(p.grid().x(i)) * p[i] / static_cast<double>(p.size());
    EXPECT_GT(std::abs(ov), prev_overlap);
    prev_overlap = std::abs(ov);
    EXPECT_NEAR(e.gap.width(), v0 / 2, 0.05 * v0);
  }
  EXPECT_GT(prev_overlap, 0.9999);
}

TEST(BandEdge, FlatBandIsRejected) {
  // Deep lattice: the first band is flat to far below the 1e-8 curvature floor.
  EXPECT_THROW(band_edge_data(Model{1.0, 400.0, 1.0}, 1, Edge::low), NumericalError);
}
