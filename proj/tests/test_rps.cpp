#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "panoview/rps.hpp"

using namespace panoview;
namespace fx = panoview::testing;

namespace {

RpsConfig smallConfig() {
  RpsConfig cfg;
  cfg.viewportSize = 16;
  return cfg;
}

NeighborSet sameLatitude(double lat) {
  NeighborSet s;
  for (int k = 0; k < kNumDirections; ++k) s[static_cast<std::size_t>(k)] = SphereCoord(lat, k * 45.0 - 180.0);
  return s;
}

}  // namespace

TEST(Softmax, UniformAndNormalized) {
  const auto p = softmax({3, 3, 3, 3, 3, 3, 3, 3});
  for (double v : p.values) EXPECT_DOUBLE_EQ(v, 0.125);
  std::mt19937 gen(1);
  std::uniform_real_distribution<double> d(-50, 50);
  for (int i = 0; i < 1000; ++i) {
    std::array<double, 8> x{};
    for (double& v : x) v = d(gen);
    const auto q = softmax(x);
    ASSERT_NEAR(q.sum(), 1.0, 1e-12);
    for (double v : q.values) ASSERT_GE(v, 0.0);
  }
}

TEST(EquatorBias, EqualLatitudesAreUniform) {
  const auto p = equatorBiasProb(sameLatitude(30), 0.2);
  for (double v : p.values) EXPECT_NEAR(v, 0.125, 1e-15);
}

TEST(EquatorBias, WeightRatioBetweenEquatorAndSixty) {
  NeighborSet s = sameLatitude(0);
  s[1] = SphereCoord(60, 0);
  const auto w = equatorBiasWeights(s, 0.2);
  EXPECT_NEAR(w[0] / w[1], std::exp(5.0 / 0.9), 1e-9);
  EXPECT_NEAR(std::log(w[0] / w[1]), 5.5556, 1e-4);
  const auto p = equatorBiasProb(s, 0.2);
  EXPECT_GT(p[0], p[1]);
}

TEST(EquatorBias, SymmetricAboutEquator) {
  const auto n = equatorBiasWeights(sameLatitude(37), 0.2);
  const auto s = equatorBiasWeights(sameLatitude(-37), 0.2);
  EXPECT_EQ(n, s);
}

TEST(BackPointing, ReversesThePreviousMove) {
  const TransitionStep step{};
  for (int k = 0; k < kNumDirections; ++k) {
    const SphereCoord prev(0, 0);
    const SphereCoord cur = stepToward(prev, step, k);
    EXPECT_EQ(backPointingIndex(neighborCoords(cur, step), prev), (k + 4) % 8) << kDirectionNames[k];
  }
}

TEST(Csp, InhibitionOfReturnLowersOnlyTheBackDirection) {
  const auto prior = softmax({0, 0, 0, 0, 0, 0, 0, 0});
  const auto p = cspFromPrior(prior, 3, 0.7);
  const double a = std::exp(0.7 / 8), b = std::exp(1.0 / 8);
  EXPECT_NEAR(p[3], a / (a + 7 * b), 1e-15);
  for (int k = 0; k < 8; ++k) {
    if (k == 3) EXPECT_LT(p[k], 0.125);
    else EXPECT_GT(p[k], 0.125);
  }
  const auto none = cspFromPrior(prior, std::nullopt, 0.7);
  for (double v : none.values) EXPECT_DOUBLE_EQ(v, 0.125);
  const auto unit = cspFromPrior(prior, 3, 1.0);
  for (double v : unit.values) EXPECT_DOUBLE_EQ(v, 0.125);
}

TEST(Dsp, ConstantPatchesAreUniform) {
  const auto p = dsp(splitPatches(GrayImage(16, 16, 40)));
  for (double v : p.values) EXPECT_DOUBLE_EQ(v, 0.125);
}

TEST(Dsp, OneInformativePatchDominates) {
  const auto p = dspFromEntropies({0, 0, 8, 0, 0, 0, 0, 0});
  EXPECT_NEAR(p[2], std::exp(8.0) / (std::exp(8.0) + 7), 1e-12);
  EXPECT_NEAR(p[2], 0.9977, 1e-4);
}

TEST(Combine, SharpensTowardDetail) {
  const auto uniform = softmax({0, 0, 0, 0, 0, 0, 0, 0});
  const auto pDsp = dspFromEntropies({0, 0, 8, 0, 0, 0, 0, 0});
  EXPECT_GE(combine(uniform, pDsp, 100)[2], 0.99);
  const auto flat = combine(uniform, pDsp, 1e-9);
  for (double v : flat.values) EXPECT_NEAR(v, 0.125, 1e-9);
}

TEST(Combine, NormalizedForRandomInputs) {
  std::mt19937 gen(3);
  std::uniform_real_distribution<double> e(0, 8), b(0.01, 500);
  for (int i = 0; i < 2000; ++i) {
    std::array<double, 8> ent{}, pri{};
    for (double& v : ent) v = e(gen);
    for (double& v : pri) v = e(gen);
    const auto p = combine(cspFromPrior(softmax(pri), static_cast<int>(i % 8), 0.7), dspFromEntropies(ent), b(gen));
    ASSERT_NEAR(p.sum(), 1.0, 1e-12);
  }
}

TEST(Select, UniformFrequencies) {
  const auto p = softmax({0, 0, 0, 0, 0, 0, 0, 0});
  Rng rng(99);
  std::array<int, 8> counts{};
  const int n = 80000;
  for (int i = 0; i < n; ++i) ++counts[static_cast<std::size_t>(selectDirection(p, rng))];
  for (int c : counts) EXPECT_NEAR(c / double(n), 0.125, 0.01);
}

TEST(Generate, LengthOneConsumesNoRandomness) {
  const auto img = fx::noiseErp(128, 64, 1);
  RpsConfig cfg = smallConfig();
  cfg.seqLength = 1;
  Rng a(5), b(5);
  const auto seq = generateSequence(img, SphereCoord(10, 20), cfg, a);
  EXPECT_EQ(seq.centers.size(), 1u);
  EXPECT_TRUE(seq.chosenIndices.empty());
  EXPECT_EQ(seq.centers[0], SphereCoord(10, 20));
  EXPECT_EQ(a.next(), b.next());
}

TEST(Generate, CentersFollowChosenDirections) {
  const auto img = fx::noiseErp(128, 64, 2);
  RpsConfig cfg = smallConfig();
  cfg.seqLength = 12;
  Rng rng(8);
  const auto seq = generateSequence(img, SphereCoord(0, 0), cfg, rng);
  ASSERT_EQ(seq.centers.size(), 12u);
  ASSERT_EQ(seq.chosenIndices.size(), 11u);
  for (std::size_t t = 0; t + 1 < seq.centers.size(); ++t) {
    EXPECT_EQ(seq.centers[t + 1], stepToward(seq.centers[t], cfg.step, seq.chosenIndices[t]));
  }
}

TEST(Generate, FirstStepMatchesClosedForm) {
  const auto img = fx::constantErp(128, 64);
  RpsConfig cfg = smallConfig();
  cfg.seqLength = 2;
  const SequenceGenerator gen(img, cfg);
  const SphereCoord start(30, 0);
  const auto expected = oracle::closedFormStep(30, 0, false, 0, 0, {});
  const auto exact = gen.stepDistribution(start, std::nullopt);
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(exact[k], expected[k], 1e-12);

  std::array<int, 8> counts{};
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    Rng rng(substreamSeed(77, static_cast<std::uint64_t>(i)));
    ++counts[static_cast<std::size_t>(gen.run(start, rng).chosenIndices.at(0))];
  }
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(counts[k] / double(n), expected[k], 0.01) << kDirectionNames[k];
}

TEST(Generate, SecondStepAppliesInhibition) {
  const auto img = fx::constantErp(128, 64);
  const SequenceGenerator gen(img, smallConfig());
  const auto p = gen.stepDistribution(SphereCoord(0, 24), SphereCoord(0, 0));
  const auto expected = oracle::closedFormStep(0, 24, true, 0, 0, {});
  for (int k = 0; k < 8; ++k) EXPECT_NEAR(p[k], expected[k], 1e-12);
  EXPECT_LT(p[6], p[2]);
}

TEST(Generate, DetailPullsTowardTexturedHemisphere) {
  const auto img = fx::halfNoiseErp(256, 128, 4);
  const SequenceGenerator gen(img, smallConfig());
  const auto p = gen.stepDistribution(SphereCoord(0, 0), std::nullopt);
  EXPECT_GT(p[1] + p[2] + p[3], 0.9);
}

TEST(GenerateAll, ShapesAndDeterminism) {
  const auto img = fx::noiseErp(128, 64, 3);
  RpsConfig cfg = smallConfig();
  cfg.seed = 42;
  const auto starts = defaultStarts(cfg.numSequences);
  const auto a = generateAll(img, starts, cfg);
  const auto b = generateAll(img, starts, cfg);
  ASSERT_EQ(a.size(), 3u);
  for (const auto& s : a) {
    EXPECT_EQ(s.centers.size(), 5u);
    EXPECT_EQ(s.chosenIndices.size(), 4u);
  }
  EXPECT_EQ(a, b);
  EXPECT_EQ(a, generateAll(img, starts, cfg, 4));
}

TEST(GenerateAll, SingleSequenceUsesFirstSubstream) {
  const auto img = fx::noiseErp(128, 64, 3);
  RpsConfig cfg = smallConfig();
  cfg.numSequences = 1;
  cfg.seqLength = 8;
  cfg.seed = 9;
  const auto all = generateAll(img, defaultStarts(1), cfg);
  Rng rng(substreamSeed(9, 0));
  const auto one = generateSequence(img, SphereCoord(0, 0), cfg, rng);
  EXPECT_EQ(all.at(0).centers, one.centers);
  EXPECT_EQ(all.at(0).chosenIndices, one.chosenIndices);
}

TEST(GenerateAll, AdjacentSeedsDiffer) {
  const auto img = fx::noiseErp(128, 64, 3);
  RpsConfig cfg = smallConfig();
  cfg.seqLength = 10;
  cfg.seed = 100;
  const auto a = generateAll(img, defaultStarts(3), cfg);
  cfg.seed = 101;
  const auto b = generateAll(img, defaultStarts(3), cfg);
  EXPECT_NE(a, b);
}

TEST(GenerateAll, RejectsMismatchedStarts) {
  const auto img = fx::constantErp(64, 32);
  const RpsConfig cfg = smallConfig();
  EXPECT_THROW(generateAll(img, defaultStarts(2), cfg), Error);
}

TEST(RpsConfig, Validation) {
  const auto bad = [](auto mutate) {
    RpsConfig c;
    mutate(c);
    try {
      c.validate();
    } catch (const Error& e) {
      return e.kind() == ErrorKind::InvalidConfig;
    }
    return false;
  };
  EXPECT_NO_THROW(RpsConfig{}.validate());
  EXPECT_TRUE(bad([](RpsConfig& c) { c.numSequences = 0; }));
  EXPECT_TRUE(bad([](RpsConfig& c) { c.seqLength = 0; }));
  EXPECT_TRUE(bad([](RpsConfig& c) { c.viewportSize = 225; }));
  EXPECT_TRUE(bad([](RpsConfig& c) { c.gamma = 0; }));
  EXPECT_TRUE(bad([](RpsConfig& c) { c.gamma = 1.5; }));
  EXPECT_TRUE(bad([](RpsConfig& c) { c.beta = -1; }));
  EXPECT_TRUE(bad([](RpsConfig& c) { c.equatorStd = 0; }));
  EXPECT_TRUE(bad([](RpsConfig& c) { c.fov.horizontal = 180; }));
  EXPECT_TRUE(bad([](RpsConfig& c) { c.step.dLat = NAN; }));
}
