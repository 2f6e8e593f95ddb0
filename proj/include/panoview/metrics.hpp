#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "panoview/error.hpp"
#include "panoview/random.hpp"
#include "panoview/sphere.hpp"

namespace panoview {

struct Scanpath {
  std::vector<SphereCoord> points;
  std::string label;
};

/// 72-region grid: 12 latitude bands of 15 degrees by 6 longitude bands of 60 degrees.
inline constexpr int kRegionRows = 12;
inline constexpr int kRegionCols = 6;
inline constexpr int kNumRegions = kRegionRows * kRegionCols;

/// Row-major cell index; row 0 touches the north pole, column 0 starts at lon -180.
inline int regionToken(const SphereCoord& p) noexcept {
  const int row = std::clamp(static_cast<int>(std::floor((90.0 - p.lat()) / 15.0)), 0, kRegionRows - 1);
  const int col = std::clamp(static_cast<int>(std::floor((p.lon() + 180.0) / 60.0)), 0, kRegionCols - 1);
  return row * kRegionCols + col;
}

inline std::vector<int> tokenize(std::span<const SphereCoord> points) {
  std::vector<int> out;
  out.reserve(points.size());
  for (const auto& p : points) out.push_back(regionToken(p));
  return out;
}

/// Unit-cost edit distance, two-row DP.
inline std::size_t levenshtein(std::span<const int> a, std::span<const int> b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

namespace detail {
inline void requireNonEmpty(const Scanpath& a, const Scanpath& b) {
  if (a.points.empty() || b.points.empty()) throw Error(ErrorKind::EmptyInput, "scanpath has no points");
}
}  // namespace detail

inline double lev(const Scanpath& a, const Scanpath& b) {
  detail::requireNonEmpty(a, b);
  return static_cast<double>(levenshtein(tokenize(a.points), tokenize(b.points)));
}

/// Unconstrained DTW with great-circle local cost; both endpoints matched.
inline double dtw(const Scanpath& a, const Scanpath& b) {
  detail::requireNonEmpty(a, b);
  const std::size_t n = a.points.size(), m = b.points.size();
  constexpr double inf = std::numeric_limits<double>::infinity();
  std::vector<double> prev(m + 1, inf), cur(m + 1, inf);
  prev[0] = 0.0;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = inf;
    for (std::size_t j = 1; j <= m; ++j) {
      const double cost = greatCircleDeg(a.points[i - 1], b.points[j - 1]);
      cur[j] = cost + std::min({prev[j], cur[j - 1], prev[j - 1]});
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

inline constexpr double kDefaultRecThreshold = 15.0;

/// Cross-recurrence: 100 * C / min(|a|, |b|) where C counts points of `a`
/// within `threshold` degrees of at least one point of `b`, capped at
/// min(|a|, |b|) so the result stays in [0, 100].
inline double rec(const Scanpath& a, const Scanpath& b, double threshold = kDefaultRecThreshold) {
  if (!(threshold > 0.0) || !std::isfinite(threshold)) {
    throw Error(ErrorKind::InvalidThreshold, "recurrence threshold must be positive");
  }
  detail::requireNonEmpty(a, b);
  std::size_t hits = 0;
  for (const auto& p : a.points) {
    for (const auto& q : b.points) {
      if (greatCircleDeg(p, q) < threshold) {
        ++hits;
        break;
      }
    }
  }
  const std::size_t shorter = std::min(a.points.size(), b.points.size());
  return 100.0 * static_cast<double>(std::min(hits, shorter)) / static_cast<double>(shorter);
}

enum class Metric { Lev, Dtw, Rec };

using MetricFn = std::function<double(const Scanpath&, const Scanpath&)>;

inline MetricFn metricFunction(Metric metric, double recThreshold = kDefaultRecThreshold) {
  switch (metric) {
    case Metric::Lev: return [](const Scanpath& a, const Scanpath& b) { return lev(a, b); };
    case Metric::Dtw: return [](const Scanpath& a, const Scanpath& b) { return dtw(a, b); };
    case Metric::Rec:
      if (!(recThreshold > 0.0)) throw Error(ErrorKind::InvalidThreshold, "recurrence threshold must be positive");
      return [recThreshold](const Scanpath& a, const Scanpath& b) { return rec(a, b, recThreshold); };
  }
  throw Error(ErrorKind::InvalidConfig, "unknown metric");
}

/// f(pseudo_i, gt_j) for every pair, row-major over pseudo.
template <typename F>
std::vector<double> pairwiseMatrix(std::span<const Scanpath> pseudo, std::span<const Scanpath> gt, F&& f) {
  std::vector<double> out;
  out.reserve(pseudo.size() * gt.size());
  for (const auto& p : pseudo) {
    for (const auto& g : gt) out.push_back(f(p, g));
  }
  return out;
}

/// (1/N_P)(1/N_G) sum_i sum_j f(pseudo_i, gt_j).
template <typename F>
double pairwiseAverage(std::span<const Scanpath> pseudo, std::span<const Scanpath> gt, F&& f) {
  if (pseudo.empty() || gt.empty()) throw Error(ErrorKind::EmptyInput, "pairwise average needs non-empty lists");
  double total = 0.0;
  for (double v : pairwiseMatrix(pseudo, gt, f)) total += v;
  return total / static_cast<double>(pseudo.size()) / static_cast<double>(gt.size());
}

inline double pairwiseAverage(std::span<const Scanpath> pseudo, std::span<const Scanpath> gt, Metric metric,
                              double recThreshold = kDefaultRecThreshold) {
  return pairwiseAverage(pseudo, gt, metricFunction(metric, recThreshold));
}

/// Mean of f over ordered pairs (i, j), i != j.
template <typename F>
double humanBaseline(std::span<const Scanpath> gt, F&& f) {
  if (gt.size() < 2) throw Error(ErrorKind::TooFewPaths, "human baseline needs at least two paths");
  double total = 0.0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    for (std::size_t j = 0; j < gt.size(); ++j) {
      if (i != j) total += f(gt[i], gt[j]);
    }
  }
  return total / static_cast<double>(gt.size() * (gt.size() - 1));
}

inline double humanBaseline(std::span<const Scanpath> gt, Metric metric, double recThreshold = kDefaultRecThreshold) {
  return humanBaseline(gt, metricFunction(metric, recThreshold));
}

/// Uniform points on the sphere: lon uniform, sin(lat) uniform.
inline std::vector<Scanpath> randomBaseline(std::size_t count, std::size_t length, std::uint64_t seed) {
  if (count < 1 || length < 1) throw Error(ErrorKind::InvalidConfig, "random baseline needs count, length >= 1");
  Rng rng(seed);
  std::vector<Scanpath> out(count);
  for (std::size_t i = 0; i < count; ++i) {
    out[i].label = "random-" + std::to_string(i);
    out[i].points.reserve(length);
    for (std::size_t t = 0; t < length; ++t) {
      const double lon = -180.0 + 360.0 * rng.uniform();
      const double lat = std::asin(2.0 * rng.uniform() - 1.0) * kRadToDeg;
      out[i].points.emplace_back(lat, lon);
    }
  }
  return out;
}

struct MetricValues {
  double lev = 0.0;
  double dtw = 0.0;
  double rec = 0.0;
};

struct MetricReport {
  MetricValues mean;
  std::size_t pairCount = 0;
  /// Per-pair values, row-major over pseudo paths.
  std::vector<MetricValues> perPair;
};

inline MetricReport compareSets(std::span<const Scanpath> pseudo, std::span<const Scanpath> gt,
                                double recThreshold = kDefaultRecThreshold, bool keepPerPair = false) {
  if (pseudo.empty() || gt.empty()) throw Error(ErrorKind::EmptyInput, "comparison needs non-empty lists");
  MetricReport report;
  report.pairCount = pseudo.size() * gt.size();
  const auto levs = pairwiseMatrix(pseudo, gt, metricFunction(Metric::Lev));
  const auto dtws = pairwiseMatrix(pseudo, gt, metricFunction(Metric::Dtw));
  const auto recs = pairwiseMatrix(pseudo, gt, metricFunction(Metric::Rec, recThreshold));
  for (std::size_t k = 0; k < levs.size(); ++k) {
    report.mean.lev += levs[k];
    report.mean.dtw += dtws[k];
    report.mean.rec += recs[k];
    if (keepPerPair) report.perPair.push_back({levs[k], dtws[k], recs[k]});
  }
  const double np = static_cast<double>(pseudo.size());
  const double ng = static_cast<double>(gt.size());
  report.mean.lev = report.mean.lev / np / ng;
  report.mean.dtw = report.mean.dtw / np / ng;
  report.mean.rec = report.mean.rec / np / ng;
  return report;
}

}  // namespace panoview
