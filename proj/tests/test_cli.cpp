#include <gtest/gtest.h>

#include "cli_runner.hpp"
#include "fixtures.hpp"
#include "panoview/io.hpp"

using namespace panoview;
namespace fx = panoview::testing;
namespace fs = std::filesystem;

namespace {

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fx::freshTempDir("cli");
    savePng(fx::noiseErp(128, 64, 21).rgb(), dir_ / "pano.png");
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string pano() const { return fx::quoted(dir_ / "pano.png"); }
  std::string out(const std::string& sub) const { return " --out " + fx::quoted(dir_ / sub); }

  fs::path dir_;
};

}  // namespace

TEST_F(Cli, GenerateIsDeterministic) {
  const std::string args = " --size 32 --seed 5 --n 4 --m 6 --csv";
  ASSERT_EQ(fx::runCli("generate -i " + pano() + out("a") + args), 0);
  ASSERT_EQ(fx::runCli("generate -i " + pano() + out("b") + args), 0);
  const auto a = fx::slurp(dir_ / "a" / "pano.sequences.json");
  EXPECT_FALSE(a.empty());
  EXPECT_EQ(a, fx::slurp(dir_ / "b" / "pano.sequences.json"));
  EXPECT_EQ(fx::slurp(dir_ / "a" / "pano.sequences.csv"), fx::slurp(dir_ / "b" / "pano.sequences.csv"));
  const auto file = loadSequences(dir_ / "a" / "pano.sequences.json");
  EXPECT_EQ(file.sequences.size(), 4u);
  EXPECT_EQ(file.sequences[0].centers.size(), 6u);
  EXPECT_EQ(file.seed, 5u);
}

TEST_F(Cli, GenerateDefaultsAreEchoed) {
  ASSERT_EQ(fx::runCli("generate -i " + pano() + out("d")), 0);
  const auto root = Json::parse(fx::slurp(dir_ / "d" / "pano.sequences.json"));
  EXPECT_EQ(root["seed"], 0);
  EXPECT_EQ(root["config"]["n"], 3);
  EXPECT_EQ(root["config"]["m"], 5);
  EXPECT_EQ(root["config"]["fov"], 110.0);
  EXPECT_EQ(root["config"]["size"], 224);
  EXPECT_EQ(root["config"]["gamma"], 0.7);
  EXPECT_EQ(root["config"]["beta"], 100.0);
  EXPECT_EQ(root["config"]["sigma"], 0.2);
  EXPECT_EQ(root["config"]["step"], Json::array({24.0, 24.0}));
  EXPECT_EQ(root["sequences"][0]["start"], Json::array({0.0, 0.0}));
}

TEST_F(Cli, SingleViewportSequences) {
  ASSERT_EQ(fx::runCli("generate -i " + pano() + out("m1") + " --size 32 --m 1 --start 10 20"), 0);
  const auto file = loadSequences(dir_ / "m1" / "pano.sequences.json");
  for (const auto& s : file.sequences) {
    ASSERT_EQ(s.centers.size(), 1u);
    EXPECT_EQ(s.centers[0], SphereCoord(10, 20));
    EXPECT_TRUE(s.chosenIndices.empty());
  }
}

TEST_F(Cli, ViewportsAndExtract) {
  ASSERT_EQ(fx::runCli("generate -i " + pano() + out("v") + " --size 32 --n 1 --m 2 --viewports"), 0);
  EXPECT_TRUE(fs::exists(dir_ / "v" / "pano_viewports" / "s0_t1.png"));
  ASSERT_EQ(fx::runCli("extract -i " + pano() + out("e") + " --size 40 --center 10 20 --fov 90"), 0);
  const auto vp = loadRgb(dir_ / "e" / "pano.viewport.png");
  EXPECT_EQ(vp.width(), 40);
  const auto img = loadErp(dir_ / "pano.png");
  EXPECT_TRUE(vp == extractViewport(img, SphereCoord(10, 20), FieldOfView{90, 90}, 40).pixels);
}

TEST_F(Cli, EvaluateAgainstItself) {
  ASSERT_EQ(fx::runCli("generate -i " + pano() + out("g") + " --size 32 --n 3 --m 8 --seed 1"), 0);
  const auto seqs = fx::quoted(dir_ / "g" / "pano.sequences.json");
  ASSERT_EQ(fx::runCli("evaluate -i " + seqs + " --gt " + seqs + out("ev") + " --per-pair"), 0);
  const auto root = Json::parse(fx::slurp(dir_ / "ev" / "pano.metrics.json"));
  EXPECT_EQ(root["pairCount"], 9);
  EXPECT_EQ(root["perPair"].size(), 9u);
  ASSERT_EQ(root["rows"].size(), 3u);
  EXPECT_EQ(root["rows"][0]["method"], "Random Baseline");
  EXPECT_EQ(root["rows"][1]["method"], "RPS");
  EXPECT_EQ(root["rows"][2]["method"], "Human Baseline");
  // Diagonal pairs are identical paths.
  EXPECT_EQ(root["perPair"][0]["lev"], 0.0);
  EXPECT_EQ(root["perPair"][4]["dtw"], 0.0);
  EXPECT_EQ(root["perPair"][8]["rec"], 100.0);
}

TEST_F(Cli, EvaluateIdenticalSingletonsAndMissingHuman) {
  writeText(dir_ / "one.json", R"({"image": "p", "paths": [{"label": "a", "points": [[0,0],[10,30],[20,60]]}]})");
  const auto one = fx::quoted(dir_ / "one.json");
  ASSERT_EQ(fx::runCli("evaluate -i " + one + " --gt " + one + out("o")), 0);
  const auto root = Json::parse(fx::slurp(dir_ / "o" / "one.metrics.json"));
  ASSERT_EQ(root["rows"].size(), 2u);
  EXPECT_EQ(root["rows"][1]["lev"], 0.0);
  EXPECT_EQ(root["rows"][1]["dtw"], 0.0);
  EXPECT_EQ(root["rows"][1]["rec"], 100.0);
  EXPECT_EQ(root["pairCount"], 1);
}

TEST_F(Cli, HeatmapTotals) {
  ASSERT_EQ(fx::runCli("generate -i " + pano() + out("h") + " --size 32 --n 4 --m 7"), 0);
  ASSERT_EQ(fx::runCli("heatmap -i " + fx::quoted(dir_ / "h" / "pano.sequences.json") + out("h")), 0);
  const auto d = Json::parse(fx::slurp(dir_ / "h" / "pano.density.json"));
  EXPECT_EQ(d["total"], 28);
  std::uint64_t sum = 0;
  for (const auto& v : d["density"]) sum += v.get<std::uint64_t>();
  EXPECT_EQ(sum, 28u);
  EXPECT_EQ(loadRgb(dir_ / "h" / "pano.heatmap.png").width(), 384);
}

TEST_F(Cli, ScoreWritesReport) {
  const std::string args = " --size 32 --n 1 --m 4 --seed 3";
  ASSERT_EQ(fx::runCli("score -i " + pano() + out("s1") + args), 0);
  ASSERT_EQ(fx::runCli("score -i " + pano() + out("s2") + args), 0);
  const auto r1 = fx::slurp(dir_ / "s1" / "pano.report.json");
  EXPECT_EQ(r1, fx::slurp(dir_ / "s2" / "pano.report.json"));
  EXPECT_EQ(fx::slurp(dir_ / "s1" / "pano.heatmap.png"), fx::slurp(dir_ / "s2" / "pano.heatmap.png"));
  const auto root = Json::parse(r1);
  ASSERT_EQ(root["perSequence"].size(), 1u);
  EXPECT_EQ(root["finalScore"], root["perSequence"][0]["value"]);
}

TEST_F(Cli, ExitCodes) {
  savePng(RgbImage(30, 20), dir_ / "bad.png");
  EXPECT_EQ(fx::runCli("generate -i " + fx::quoted(dir_ / "bad.png") + out("x")), 2);
  EXPECT_EQ(fx::runCli("generate -i " + fx::quoted(dir_ / "absent.png") + out("x")), 3);
  EXPECT_EQ(fx::runCli("generate -i " + pano() + out("x") + " --size 30"), 2);
  EXPECT_EQ(fx::runCli("generate -i " + pano() + out("x") + " --gamma 0"), 2);
  EXPECT_EQ(fx::runCli("generate --bogus"), 2);
  EXPECT_EQ(fx::runCli("score -i " + pano() + out("x") + " --scorer magic"), 2);
  EXPECT_EQ(fx::runCli("evaluate -i " + pano() + out("x") + " --gt " + pano() + " --rec-threshold 0"), 2);
}

TEST_F(Cli, ConfigFileSuppliesOptions) {
  writeText(dir_ / "run.toml", "[generate]\nn = 2\nm = 3\nsize = 32\nseed = 7\n");
  ASSERT_EQ(fx::runCli("--config " + fx::quoted(dir_ / "run.toml") + " generate -i " + pano() + out("c") + " --m 4"), 0);
  const auto file = loadSequences(dir_ / "c" / "pano.sequences.json");
  EXPECT_EQ(file.seed, 7u);
  ASSERT_EQ(file.sequences.size(), 2u);
  // Command-line flags win over the file.
  EXPECT_EQ(file.sequences[0].centers.size(), 4u);
}
