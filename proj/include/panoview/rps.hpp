#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <span>
#include <thread>
#include <vector>

#include "panoview/error.hpp"
#include "panoview/image.hpp"
#include "panoview/random.hpp"
#include "panoview/sphere.hpp"

// Recursive probability sampling of viewport sequences.
//
// One step from center x with neighbours X (8 candidates, Direction order):
//   prior_i  = exp(-(lat_i / 90)^2 / (2 sigma^2)),   M_p = softmax(prior)
//   p_csp    = softmax(Z * M_p),  Z = 1 except gamma at the back-pointing index
//   p_dsp    = softmax(entropy of each neighbour patch, in bits)
//   p_final  = softmax(beta * p_dsp * p_csp)
// and the next center is a categorical draw from p_final.

namespace panoview {

struct RpsConfig {
  int numSequences = 3;
  int seqLength = 5;
  TransitionStep step{};
  FieldOfView fov{};
  int viewportSize = 224;
  double gamma = 0.7;
  double beta = 100.0;
  double equatorStd = 0.2;
  std::uint64_t seed = 0;

  void validate() const {
    if (numSequences < 1) throw Error(ErrorKind::InvalidConfig, "number of sequences must be >= 1");
    if (seqLength < 1) throw Error(ErrorKind::InvalidConfig, "sequence length must be >= 1");
    if (!std::isfinite(step.dLat) || !std::isfinite(step.dLon)) {
      throw Error(ErrorKind::InvalidConfig, "transition step must be finite");
    }
    fov.validate();
    if (viewportSize < 4 || viewportSize % 4 != 0) {
      throw Error(ErrorKind::InvalidConfig, "viewport size must be a positive multiple of 4");
    }
    if (!(gamma > 0.0 && gamma <= 1.0)) throw Error(ErrorKind::InvalidConfig, "gamma must lie in (0, 1]");
    if (!(beta > 0.0) || !std::isfinite(beta)) throw Error(ErrorKind::InvalidConfig, "beta must be > 0");
    if (!(equatorStd > 0.0)) throw Error(ErrorKind::InvalidConfig, "equator std must be > 0");
  }
};

/// Distribution over the eight transition directions.
struct DirectionProbs {
  std::array<double, kNumDirections> values{};

  double operator[](std::size_t i) const { return values[i]; }
  double sum() const noexcept {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
  }
};

inline DirectionProbs softmax(const std::array<double, kNumDirections>& logits) {
  const double peak = *std::max_element(logits.begin(), logits.end());
  DirectionProbs out;
  double total = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out.values[i] = std::exp(logits[i] - peak);
    total += out.values[i];
  }
  for (double& v : out.values) v /= total;
  return out;
}

/// Equator-bias prior at each candidate, before normalization.
inline std::array<double, kNumDirections> equatorBiasWeights(const NeighborSet& coords, double sigma) {
  std::array<double, kNumDirections> w{};
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const double z = coords[i].lat() / 90.0;
    w[i] = std::exp(-(z * z) / (2.0 * sigma * sigma));
  }
  return w;
}

/// M_p sampled at the candidates.
inline DirectionProbs equatorBiasProb(const NeighborSet& coords, double sigma) {
  return softmax(equatorBiasWeights(coords, sigma));
}

/// Candidate nearest (great-circle) to the previous center; ties go to the lowest index.
inline int backPointingIndex(const NeighborSet& coords, const SphereCoord& previous) {
  int best = 0;
  double bestDist = std::numeric_limits<double>::infinity();
  for (int i = 0; i < kNumDirections; ++i) {
    const double d = greatCircleDeg(coords[static_cast<std::size_t>(i)], previous);
    if (d < bestDist) {
      bestDist = d;
      best = i;
    }
  }
  return best;
}

/// softmax(Z * prior) with Z = gamma at `backIndex`, 1 elsewhere.
inline DirectionProbs cspFromPrior(const DirectionProbs& prior, std::optional<int> backIndex, double gamma) {
  std::array<double, kNumDirections> logits = prior.values;
  if (backIndex) logits.at(static_cast<std::size_t>(*backIndex)) *= gamma;
  return softmax(logits);
}

inline DirectionProbs csp(const NeighborSet& coords, std::optional<int> backIndex, double gamma, double sigma) {
  return cspFromPrior(equatorBiasProb(coords, sigma), backIndex, gamma);
}

inline DirectionProbs dspFromEntropies(const std::array<double, kNumDirections>& entropies) {
  return softmax(entropies);
}

/// Softmax over neighbour-patch entropies; the central patch does not take part.
inline DirectionProbs dsp(const PatchGrid& patches) {
  std::array<double, kNumDirections> entropies{};
  for (std::size_t i = 0; i < entropies.size(); ++i) entropies[i] = grayEntropy(patches.neighbors[i]);
  return dspFromEntropies(entropies);
}

inline DirectionProbs combine(const DirectionProbs& pCsp, const DirectionProbs& pDsp, double beta) {
  std::array<double, kNumDirections> logits{};
  for (std::size_t i = 0; i < logits.size(); ++i) logits[i] = pDsp.values[i] * pCsp.values[i] * beta;
  return softmax(logits);
}

inline int selectDirection(const DirectionProbs& probs, Rng& rng) {
  return static_cast<int>(rng.categorical(probs.values));
}

inline int combineAndSelect(const DirectionProbs& pCsp, const DirectionProbs& pDsp, double beta, Rng& rng) {
  return selectDirection(combine(pCsp, pDsp, beta), rng);
}

struct ViewportSequence {
  SphereCoord start;
  std::vector<SphereCoord> centers;
  std::vector<int> chosenIndices;
  std::uint64_t seed = 0;

  friend bool operator==(const ViewportSequence&, const ViewportSequence&) = default;
};

/// Reusable per-configuration state for sequence generation.
class SequenceGenerator {
 public:
  SequenceGenerator(const ErpImage& img, const RpsConfig& cfg)
      : img_(img), cfg_((cfg.validate(), cfg)), projector_(cfg.fov, cfg.viewportSize, cfg.viewportSize) {}

  const RpsConfig& config() const noexcept { return cfg_; }

  /// Probability of each direction for one step from `current`.
  DirectionProbs stepDistribution(const SphereCoord& current, const std::optional<SphereCoord>& previous) const {
    const NeighborSet candidates = neighborCoords(current, cfg_.step);
    const Viewport vp = projector_.extract(img_, current);
    const DirectionProbs pDsp = dsp(splitPatches(vp));
    std::optional<int> back;
    if (previous) back = backPointingIndex(candidates, *previous);
    const DirectionProbs pCsp = csp(candidates, back, cfg_.gamma, cfg_.equatorStd);
    return combine(pCsp, pDsp, cfg_.beta);
  }

  /// Runs seqLength - 1 draws; a length-1 sequence consumes no randomness.
  ViewportSequence run(const SphereCoord& start, Rng& rng, std::uint64_t seed = 0) const {
    ViewportSequence seq;
    seq.start = start;
    seq.seed = seed;
    seq.centers.reserve(static_cast<std::size_t>(cfg_.seqLength));
    seq.chosenIndices.reserve(static_cast<std::size_t>(cfg_.seqLength - 1));
    seq.centers.push_back(start);
    std::optional<SphereCoord> previous;
    for (int t = 1; t < cfg_.seqLength; ++t) {
      const SphereCoord current = seq.centers.back();
      const int k = selectDirection(stepDistribution(current, previous), rng);
      seq.chosenIndices.push_back(k);
      seq.centers.push_back(stepToward(current, cfg_.step, k));
      previous = current;
    }
    return seq;
  }

 private:
  const ErpImage& img_;
  RpsConfig cfg_;
  ViewportProjector projector_;
};

inline ViewportSequence generateSequence(const ErpImage& img, const SphereCoord& start, const RpsConfig& cfg,
                                         Rng& rng) {
  return SequenceGenerator(img, cfg).run(start, rng);
}

/// Sequence i draws from Rng(substreamSeed(cfg.seed, i)). Results do not
/// depend on `threads`.
inline std::vector<ViewportSequence> generateAll(const ErpImage& img, std::span<const SphereCoord> starts,
                                                 const RpsConfig& cfg, unsigned threads = 1) {
  if (starts.size() != static_cast<std::size_t>(cfg.numSequences)) {
    throw Error(ErrorKind::InvalidConfig, "expected " + std::to_string(cfg.numSequences) +
                                              " starting points, got " + std::to_string(starts.size()));
  }
  const SequenceGenerator gen(img, cfg);
  std::vector<ViewportSequence> out(starts.size());
  auto work = [&](std::size_t i) {
    const std::uint64_t seed = substreamSeed(cfg.seed, i);
    Rng rng(seed);
    out[i] = gen.run(starts[i], rng, seed);
  };
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(starts.size())));
  if (threads == 1) {
    for (std::size_t i = 0; i < starts.size(); ++i) work(i);
    return out;
  }
  std::vector<std::exception_ptr> failures(threads);
  {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < threads; ++w) {
      pool.emplace_back([&, w] {
        try {
          for (std::size_t i = w; i < starts.size(); i += threads) work(i);
        } catch (...) {
          failures[w] = std::current_exception();
        }
      });
    }
  }
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }
  return out;
}

inline std::vector<SphereCoord> defaultStarts(int count) {
  return std::vector<SphereCoord>(static_cast<std::size_t>(std::max(count, 0)), SphereCoord(0.0, 0.0));
}

}  // namespace panoview
