#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <numbers>

#include "gapsol/config.hpp"
#include "gapsol/errors.hpp"

using namespace gapsol;

namespace {
ExperimentConfig build(const Assignments& file, const Assignments& flags = {}) {
  return build_config(file, flags, false);
}
std::string message_of(const Assignments& flags) {
  try {
    build({}, flags);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST(Config, DefaultsMatchKeyTable) {
  auto c = build({});
  EXPECT_EQ(c.model.lattice_depth, 4.0);
  EXPECT_EQ(c.model.nonlinearity, 1.0);
  EXPECT_EQ(c.model.kinetic, 1.0);
  EXPECT_EQ(c.num_points, 1024u);
  EXPECT_EQ(c.periods, 32);
  EXPECT_EQ(c.dt, 1e-3);
  EXPECT_EQ(c.checkpoint_every, 10);
  EXPECT_EQ(c.theta_samples, 64);
  EXPECT_FALSE(c.theta.has_value());
  EXPECT_EQ(c.mu_step, 0.02);
  for (const auto& k : config_keys()) EXPECT_EQ(c.effective.at(k.name), k.default_value) << k.name;
}

TEST(Config, ParsesSectionsAndComments) {
  auto a = parse_config_text("# header\n[physics]\nV0 = 6  # deeper\nmu=2.2\n\n[numerics]\nN = 2048\nrun.task = squeeze\n");
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[0], (std::pair<std::string, std::string>{"physics.V0", "6"}));
  EXPECT_EQ(a[2].first, "numerics.N");
  EXPECT_EQ(a[3].first, "run.task");
  auto c = build(a);
  EXPECT_EQ(c.model.lattice_depth, 6.0);
  EXPECT_EQ(c.mu, 2.2);
  EXPECT_EQ(c.num_points, 2048u);
  EXPECT_EQ(c.task, "squeeze");
}

TEST(Config, MalformedLinesRejected) {
  EXPECT_THROW(parse_config_text("[physics\n"), ConfigError);
  EXPECT_THROW(parse_config_text("V0 4\n"), ConfigError);
}

TEST(Config, UnknownKeyNamed) {
  const auto m = message_of({{"physics.nope", "1"}});
  EXPECT_NE(m.find("unknown key 'physics.nope'"), std::string::npos) << m;
}

TEST(Config, MalformedNumberNamesKey) {
  const auto m = message_of({{"physics.V0", "four"}});
  EXPECT_NE(m.find("physics.V0"), std::string::npos);
  EXPECT_NE(m.find("malformed"), std::string::npos);
  EXPECT_NE(message_of({{"numerics.N", "1e3x"}}).find("numerics.N"), std::string::npos);
}

TEST(Config, OutOfRangeNamesKey) {
  const auto m = message_of({{"numerics.N", "1000"}});
  EXPECT_NE(m.find("numerics.N"), std::string::npos);
  EXPECT_NE(m.find("power of two"), std::string::npos);
  EXPECT_NE(message_of({{"physics.V0", "-1"}}).find("physics.V0"), std::string::npos);
  EXPECT_NE(message_of({{"numerics.theta_samples", "4"}}).find("numerics.theta_samples"),
            std::string::npos);
}

TEST(Config, DistinctMessagesPerErrorKind) {
  const auto unknown = message_of({{"physics.nope", "1"}});
  const auto malformed = message_of({{"physics.V0", "x"}});
  const auto range = message_of({{"physics.V0", "-1"}});
  const auto preset = message_of({{"run.preset", "fig9"}});
  EXPECT_NE(preset.find("unknown preset 'fig9'"), std::string::npos);
  EXPECT_NE(unknown, malformed);
  EXPECT_NE(malformed, range);
  EXPECT_NE(range, preset);
}

TEST(Config, EnumeratedValuesChecked) {
  EXPECT_NE(message_of({{"physics.parity", "sideways"}}).find("physics.parity"), std::string::npos);
  EXPECT_NE(message_of({{"run.task", "dance"}}).find("run.task"), std::string::npos);
}

TEST(Config, ThetaDegreesAndSeparationAuto) {
  auto c = build({}, {{"numerics.theta", "45"}, {"physics.separation", "auto"}});
  ASSERT_TRUE(c.theta.has_value());
  EXPECT_NEAR(*c.theta, std::numbers::pi / 4, 1e-15);
  EXPECT_EQ(c.separation, 0);
}

TEST(Config, ListsParsed) {
  auto c = build({}, {{"physics.mu_list", "1.91, 2.5,3"}, {"numerics.times", "0,4,8"}});
  EXPECT_EQ(c.mu_list, (std::vector<double>{1.91, 2.5, 3.0}));
  EXPECT_EQ(c.times, (std::vector<double>{0.0, 4.0, 8.0}));
}

TEST(Config, PresetFig1) {
  auto c = build({}, {{"run.preset", "fig1"}});
  EXPECT_EQ(c.preset, "fig1");
  EXPECT_EQ(c.task, "fig1");
  EXPECT_EQ(c.model.lattice_depth, 4.0);
  EXPECT_EQ(c.mu_start, 1.91);
  EXPECT_EQ(c.mu_end, 3.85);
  EXPECT_EQ(c.mu_list, (std::vector<double>{1.91, 3.0, 3.85}));
}

TEST(Config, PresetFig5) {
  auto c = build({}, {{"run.preset", "fig5"}});
  EXPECT_EQ(c.model.lattice_depth, 4.0);
  EXPECT_EQ(c.mu, 2.5);
  EXPECT_EQ(c.parity, "both");
}

TEST(Config, EveryPresetBuilds) {
  for (const auto& p : preset_names()) EXPECT_NO_THROW(build({}, {{"run.preset", p}})) << p;
}

TEST(Config, LayerPrecedence) {
  // preset < file < flags
  auto c = build({{"run.preset", "fig5"}, {"physics.mu", "2.6"}, {"physics.V0", "5"}},
                 {{"physics.V0", "6"}});
  EXPECT_EQ(c.mu, 2.6);
  EXPECT_EQ(c.model.lattice_depth, 6.0);
  EXPECT_EQ(c.task, "fig5");
  EXPECT_EQ(c.effective.at("physics.V0"), "6");
}

TEST(Config, EnvironmentSitsBetweenFileAndFlags) {
  ::setenv("GAPSOL_OUTPUT_DIR", "/tmp/from-env", 1);
  ::setenv("GAPSOL_WORKERS", "3", 1);
  auto a = build_config({{"output.dir", "/tmp/from-file"}}, {}, true);
  EXPECT_EQ(a.output_dir, "/tmp/from-env");
  EXPECT_EQ(a.workers, 3u);
  auto b = build_config({}, {{"output.dir", "/tmp/from-flag"}}, true);
  EXPECT_EQ(b.output_dir, "/tmp/from-flag");
  auto c = build_config({}, {}, false);
  EXPECT_EQ(c.output_dir, "gapsol-out");
  ::unsetenv("GAPSOL_OUTPUT_DIR");
  ::unsetenv("GAPSOL_WORKERS");
}

TEST(Config, ReadsFile) {
  const auto path = std::filesystem::temp_directory_path() / "gapsol_cfg_test.ini";
  std::ofstream(path) << "[physics]\ng = 2\n";
  auto c = build(read_config_file(path));
  EXPECT_EQ(c.model.nonlinearity, 2.0);
  std::filesystem::remove(path);
  EXPECT_THROW(read_config_file(path), ConfigError);
}
