#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <random>
#include <string>

#include "panoview/image.hpp"

namespace panoview::testing {

inline ErpImage constantErp(int width, int height, Rgb color = {90, 120, 150}) {
  return ErpImage(RgbImage(width, height, color));
}

/// Independent uniform gray noise per pixel.
inline ErpImage noiseErp(int width, int height, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  RgbImage img(width, height);
  for (auto& p : img.pixels()) {
    const auto v = static_cast<std::uint8_t>(dist(gen));
    p = {v, v, v};
  }
  return ErpImage(std::move(img));
}

/// Noise on the eastern hemisphere (lon >= 0), constant gray on the western one.
inline ErpImage halfNoiseErp(int width, int height, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  RgbImage img(width, height, Rgb{128, 128, 128});
  for (int r = 0; r < height; ++r) {
    for (int c = width / 2; c < width; ++c) {
      const auto v = static_cast<std::uint8_t>(dist(gen));
      img.at(r, c) = {v, v, v};
    }
  }
  return ErpImage(std::move(img));
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path freshTempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  std::random_device rd;
  const auto dir = std::filesystem::temp_directory_path() /
                   ("panoview_" + tag + "_" + std::to_string(rd()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace panoview::testing
