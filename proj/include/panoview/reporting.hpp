#pragma once

#include <array>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "panoview/error.hpp"
#include "panoview/image.hpp"
#include "panoview/image_io.hpp"
#include "panoview/metrics.hpp"
#include "panoview/rps.hpp"

namespace panoview {

struct DensityGrid {
  std::array<std::uint64_t, kNumRegions> counts{};
  std::uint64_t total = 0;

  void add(const SphereCoord& c) {
    ++counts[static_cast<std::size_t>(regionToken(c))];
    ++total;
  }
};

inline DensityGrid accumulateDensity(std::span<const ViewportSequence> sequences) {
  DensityGrid grid;
  for (const auto& seq : sequences) {
    for (const auto& c : seq.centers) grid.add(c);
  }
  return grid;
}

struct HeatmapStyle {
  int cellWidth = 64;
  int cellHeight = 16;
};

/// 6 x 12 cell image in ERP layout. Brightness is round(255 * count / max);
/// an all-zero grid renders black.
inline GrayImage renderHeatmap(const DensityGrid& grid, const HeatmapStyle& style = {}) {
  if (style.cellWidth < 1 || style.cellHeight < 1) throw Error(ErrorKind::InvalidConfig, "heatmap cell size must be positive");
  GrayImage img(kRegionCols * style.cellWidth, kRegionRows * style.cellHeight);
  std::uint64_t peak = 0;
  for (auto c : grid.counts) peak = std::max(peak, c);
  if (peak == 0) return img;
  for (int row = 0; row < kRegionRows; ++row) {
    for (int col = 0; col < kRegionCols; ++col) {
      const auto count = grid.counts[static_cast<std::size_t>(row * kRegionCols + col)];
      const auto level = static_cast<std::uint8_t>(
          std::lround(255.0 * static_cast<double>(count) / static_cast<double>(peak)));
      for (int y = 0; y < style.cellHeight; ++y) {
        for (int x = 0; x < style.cellWidth; ++x) img.at(row * style.cellHeight + y, col * style.cellWidth + x) = level;
      }
    }
  }
  return img;
}

inline void writeHeatmap(const DensityGrid& grid, const std::filesystem::path& path, const HeatmapStyle& style = {}) {
  savePng(renderHeatmap(grid, style), path);
}

struct SequenceScore {
  std::size_t sequenceId = 0;
  double value = 0.0;
};

/// Image-level score: arithmetic mean of per-sequence scores.
inline double aggregateQuality(std::span<const SequenceScore> scores) {
  if (scores.empty()) throw Error(ErrorKind::EmptyInput, "no sequence scores to aggregate");
  double total = 0.0;
  for (const auto& s : scores) {
    if (!std::isfinite(s.value)) throw Error(ErrorKind::InvalidConfig, "non-finite sequence score");
    total += s.value;
  }
  return total / static_cast<double>(scores.size());
}

/// Anything that maps (image, sequence) to one scalar score.
template <typename S>
concept SequenceScorer = requires(const S& s, const ErpImage& img, const ViewportSequence& seq) {
  { s(img, seq) } -> std::convertible_to<double>;
};

/// Demonstration scorer: mean gray-level entropy of the sequence's
/// viewports. Not a perceptual quality model.
class EntropyScorer {
 public:
  EntropyScorer(const FieldOfView& fov, int viewportSize)
      : projector_(std::make_shared<ViewportProjector>(fov, viewportSize, viewportSize)) {}
  explicit EntropyScorer(const RpsConfig& cfg) : EntropyScorer(cfg.fov, cfg.viewportSize) {}

  double operator()(const ErpImage& img, const ViewportSequence& seq) const {
    if (seq.centers.empty()) throw Error(ErrorKind::EmptyInput, "sequence has no viewports");
    double total = 0.0;
    for (const auto& c : seq.centers) total += grayEntropy(toGray(projector_->extract(img, c).pixels));
    return total / static_cast<double>(seq.centers.size());
  }

 private:
  std::shared_ptr<const ViewportProjector> projector_;
};

static_assert(SequenceScorer<EntropyScorer>);

using ScorerFn = std::function<double(const ErpImage&, const ViewportSequence&)>;

template <SequenceScorer S>
std::vector<SequenceScore> scoreSequences(const ErpImage& img, std::span<const ViewportSequence> sequences,
                                          const S& scorer) {
  std::vector<SequenceScore> out;
  out.reserve(sequences.size());
  for (std::size_t i = 0; i < sequences.size(); ++i) out.push_back({i, static_cast<double>(scorer(img, sequences[i]))});
  return out;
}

}  // namespace panoview
