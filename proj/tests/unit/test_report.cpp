#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>

#include "pinchlab/experiments.hpp"
#include "pinchlab/report.hpp"

namespace pinchlab {
namespace {

TEST(Report, EmptySuiteRoundTrips) {
  const Report r;
  const Report back = read_json(emit_json(r));
  EXPECT_TRUE(back.records.empty());
  EXPECT_EQ(back.passed(), 0);
  EXPECT_TRUE(read_csv(emit_csv(r)).empty());
}

TEST(Report, CountsSurviveRoundTrip) {
  Report r;
  r.config = {{"command", "verify"}, {"seed", "1"}};
  r.check_le("a", "x <= 1", 0.5, 1.0, 0.0);
  r.check_eq("b", "x = 2, with \"quotes\", commas", 2.5, 2.0, 0.1);
  r.check_ge("c", "x >= 0", std::nan(""), 0.0, 0.0);
  EXPECT_EQ(r.passed(), 1);
  EXPECT_EQ(r.failed(), 2);
  const Report j = read_json(emit_json(r));
  EXPECT_EQ(j.passed(), 1);
  EXPECT_EQ(j.failed(), 2);
  EXPECT_EQ(j.records[1].anchor, r.records[1].anchor);
  const auto c = read_csv(emit_csv(r));
  ASSERT_EQ(c.size(), 3u);
  EXPECT_EQ(c[1].anchor, r.records[1].anchor);
  EXPECT_FALSE(c[2].pass);
}

TEST(Report, RejectsMalformed) {
  EXPECT_THROW(read_json("{"), IoError);
  EXPECT_THROW(read_json("{\"records\": []}"), IoError);
  EXPECT_THROW(read_csv("wrong,header\n"), IoError);
  EXPECT_THROW(write_file("/nonexistent-dir/x.json", "{}"), IoError);
}

TEST(Report, Round12) { EXPECT_EQ(round12(0.1 + 0.2), 0.3); }

TEST(Config, ParsesWithLineNumbers) {
  const ConfigMap m = parse_config_text("# comment\ndim = 5\n\nnorm=op  # trailing\n");
  EXPECT_EQ(m.at("dim").value, "5");
  EXPECT_EQ(m.at("dim").line, 2);
  EXPECT_EQ(m.at("norm").value, "op");
  EXPECT_THROW(parse_config_text("dim 5\n"), ConfigError);
}

TEST(Config, LaterLayersWinAndErrorsNameTheLine) {
  const ExperimentConfig cfg = build_config({parse_config_text("dim=5\nseed=3\n"), {{"dim", {"7", 0}}}});
  EXPECT_EQ(cfg.dim, 7);
  EXPECT_EQ(cfg.seed, 3u);
  try {
    build_config({parse_config_text("seed=1\ndim=abc\n")});
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
  }
  EXPECT_THROW(build_config({{{"bogus", {"1", 0}}}}), ConfigError);
  EXPECT_THROW(build_config({{{"dim", {"40", 0}}}}), ConfigError);
  EXPECT_THROW(build_config({{{"command", {"nope", 0}}}}), ConfigError);
  EXPECT_THROW(build_config({{{"blocks", {"2,0", 0}}}}), ConfigError);
  EXPECT_EQ(parse_blocks("1, 2,3"), (std::vector<int>{1, 2, 3}));
}

TEST(Run, DeterministicJson) {
  ExperimentConfig cfg;
  cfg.command = "lipschitz";
  cfg.trials = 5;
  EXPECT_EQ(emit_json(run(cfg)), emit_json(run(cfg)));
}

TEST(Run, ThreadCountDoesNotChangeOutput) {
  ExperimentConfig cfg;
  cfg.command = "section";
  cfg.trials = 6;
  const std::string one = emit_json(run(cfg));
  setenv("PINCHLAB_THREADS", "3", 1);
  const std::string three = emit_json(run(cfg));
  unsetenv("PINCHLAB_THREADS");
  EXPECT_EQ(one, three);
}

TEST(Run, FiberCommandOnFourRankOneBlocks) {
  ExperimentConfig cfg;
  cfg.command = "fiber";
  cfg.dim = 4;
  cfg.blocks = {1, 1, 1, 1};
  const Report r = run(cfg);
  EXPECT_TRUE(r.all_pass());
  bool saw_size = false;
  for (const auto& rec : r.records) {
    if (rec.check == "fiber.size") {
      saw_size = true;
      EXPECT_EQ(rec.measured, 24.0);
    }
  }
  EXPECT_TRUE(saw_size);
}

TEST(Run, TopologyGapSchatten1) {
  ExperimentConfig cfg;
  cfg.command = "topology-gap";
  cfg.norm = "s1";
  EXPECT_TRUE(run(cfg).all_pass());
  cfg.norm = "op";
  EXPECT_FALSE(run(cfg).all_pass());
}

TEST(Run, TimingOnlyWhenRequested) {
  ExperimentConfig cfg;
  cfg.command = "lipschitz";
  cfg.trials = 2;
  EXPECT_EQ(emit_json(run(cfg)).find("wall_clock"), std::string::npos);
  cfg.timing = true;
  EXPECT_NE(emit_json(run(cfg)).find("wall_clock"), std::string::npos);
}

}  // namespace
}  // namespace pinchlab
