#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "panoview/error.hpp"
#include "panoview/sphere.hpp"

namespace panoview {

struct Rgb {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  friend constexpr bool operator==(const Rgb&, const Rgb&) = default;
};

/// Row-major raster.
template <typename Pixel>
class Raster {
 public:
  Raster() = default;
  Raster(int width, int height, Pixel fill = Pixel{})
      : width_(width), height_(height), pixels_(checkedArea(width, height), fill) {}

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  bool empty() const noexcept { return pixels_.empty(); }

  Pixel& at(int row, int col) { return pixels_[index(row, col)]; }
  const Pixel& at(int row, int col) const { return pixels_[index(row, col)]; }

  std::span<Pixel> pixels() noexcept { return pixels_; }
  std::span<const Pixel> pixels() const noexcept { return pixels_; }
  std::span<const Pixel> row(int r) const noexcept {
    return std::span<const Pixel>(pixels_).subspan(static_cast<std::size_t>(r) * width_, width_);
  }

  friend bool operator==(const Raster&, const Raster&) = default;

 private:
  static std::size_t checkedArea(int width, int height) {
    if (width < 0 || height < 0) throw Error(ErrorKind::InvalidConfig, "negative raster size");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int row, int col) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<Pixel> pixels_;
};

using RgbImage = Raster<Rgb>;
using GrayImage = Raster<std::uint8_t>;

/// BT.601 luma, round-half-up: (299 R + 587 G + 114 B + 500) / 1000.
constexpr std::uint8_t luma(const Rgb& p) noexcept {
  return static_cast<std::uint8_t>((299u * p.r + 587u * p.g + 114u * p.b + 500u) / 1000u);
}

inline GrayImage toGray(const RgbImage& img) {
  GrayImage out(img.width(), img.height());
  auto src = img.pixels();
  auto dst = out.pixels();
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = luma(src[i]);
  return out;
}

/// Equirectangular panorama; width is exactly twice the height.
class ErpImage {
 public:
  explicit ErpImage(RgbImage raster) : raster_(std::move(raster)) {
    if (raster_.height() < 2 || raster_.width() != 2 * raster_.height()) {
      throw Error(ErrorKind::AspectError, "equirectangular image must be 2:1, got " +
                                              std::to_string(raster_.width()) + "x" +
                                              std::to_string(raster_.height()));
    }
  }

  int width() const noexcept { return raster_.width(); }
  int height() const noexcept { return raster_.height(); }
  const RgbImage& rgb() const noexcept { return raster_; }
  GrayImage gray() const { return toGray(raster_); }

  /// Bilinear sample at (lat, lon) degrees. Pixel (c, r) has its center at
  /// lon = (c + 0.5) / W * 360 - 180 and lat = 90 - (r + 0.5) / H * 180.
  /// Columns wrap around the seam; rows clamp at the poles.
  Rgb sample(double lat, double lon) const noexcept {
    const int w = raster_.width();
    const int h = raster_.height();
    const double u = (lon + 180.0) * (w / 360.0) - 0.5;
    const double v = (90.0 - lat) * (h / 180.0) - 0.5;
    int x0 = static_cast<int>(u);
    if (u < x0) --x0;
    int y0 = static_cast<int>(v);
    if (v < y0) --y0;
    const double ax = u - x0;
    const double ay = v - y0;
    if (x0 < 0 || x0 >= w) {
      x0 %= w;
      if (x0 < 0) x0 += w;
    }
    const int x1 = x0 + 1 == w ? 0 : x0 + 1;
    int y1 = y0 + 1;
    y0 = y0 < 0 ? 0 : (y0 >= h ? h - 1 : y0);
    y1 = y1 < 0 ? 0 : (y1 >= h ? h - 1 : y1);

    const Rgb* row0 = raster_.pixels().data() + static_cast<std::size_t>(y0) * static_cast<std::size_t>(w);
    const Rgb* row1 = raster_.pixels().data() + static_cast<std::size_t>(y1) * static_cast<std::size_t>(w);
    const Rgb& p00 = row0[x0];
    const Rgb& p01 = row0[x1];
    const Rgb& p10 = row1[x0];
    const Rgb& p11 = row1[x1];
    const double w00 = (1.0 - ax) * (1.0 - ay);
    const double w01 = ax * (1.0 - ay);
    const double w10 = (1.0 - ax) * ay;
    const double w11 = ax * ay;
    // Convex combination of 8-bit values, so value + 0.5 lies in [0.5, 255.5].
    auto mix = [&](std::uint8_t a, std::uint8_t b, std::uint8_t c, std::uint8_t d) {
      const int rounded = static_cast<int>(w00 * a + w01 * b + w10 * c + w11 * d + 0.5);
      return static_cast<std::uint8_t>(rounded > 255 ? 255 : rounded);
    };
    return {mix(p00.r, p01.r, p10.r, p11.r), mix(p00.g, p01.g, p10.g, p11.g),
            mix(p00.b, p01.b, p10.b, p11.b)};
  }

 private:
  RgbImage raster_;
};

struct Viewport {
  SphereCoord center;
  FieldOfView fov;
  RgbImage pixels;

  int width() const noexcept { return pixels.width(); }
  int height() const noexcept { return pixels.height(); }
};

/// Tangent-plane coordinates of viewport pixel centers for one (fov, size).
/// Row 0 is the top (north) edge; column 0 the west edge.
class ViewportRays {
 public:
  ViewportRays(const FieldOfView& fov, int width, int height) : fov_(fov) {
    fov.validate();
    if (width < 1 || height < 1) throw Error(ErrorKind::InvalidConfig, "viewport size must be positive");
    const double tx = std::tan(0.5 * fov.horizontal * kDegToRad);
    const double ty = std::tan(0.5 * fov.vertical * kDegToRad);
    xs_.resize(static_cast<std::size_t>(width));
    ys_.resize(static_cast<std::size_t>(height));
    for (int j = 0; j < width; ++j) xs_[static_cast<std::size_t>(j)] = tx * (2.0 * (j + 0.5) / width - 1.0);
    for (int i = 0; i < height; ++i) ys_[static_cast<std::size_t>(i)] = ty * (1.0 - 2.0 * (i + 0.5) / height);
  }

  const FieldOfView& fov() const noexcept { return fov_; }
  int width() const noexcept { return static_cast<int>(xs_.size()); }
  int height() const noexcept { return static_cast<int>(ys_.size()); }
  double x(int col) const noexcept { return xs_[static_cast<std::size_t>(col)]; }
  double y(int row) const noexcept { return ys_[static_cast<std::size_t>(row)]; }

 private:
  FieldOfView fov_;
  std::vector<double> xs_;
  std::vector<double> ys_;
};

inline Viewport extractViewport(const ErpImage& img, const SphereCoord& center, const ViewportRays& rays) {
  Viewport vp{center, rays.fov(), RgbImage(rays.width(), rays.height())};
  const TangentFrame frame(center);
  for (int i = 0; i < rays.height(); ++i) {
    const double y = rays.y(i);
    for (int j = 0; j < rays.width(); ++j) {
      const auto [lat, lon] = frame.inverseRaw(rays.x(j), y);
      vp.pixels.at(i, j) = img.sample(lat, lon);
    }
  }
  return vp;
}

/// Extracts viewports for a fixed (fov, size), caching per-pixel sphere
/// directions by center latitude. The ray geometry relative to the center
/// does not depend on center longitude, and output is bit-identical to the
/// uncached path. Safe to share between threads.
class ViewportProjector {
 public:
  ViewportProjector(const FieldOfView& fov, int width, int height) : rays_(fov, width, height) {}

  const ViewportRays& rays() const noexcept { return rays_; }

  Viewport extract(const ErpImage& img, const SphereCoord& center) const {
    const Table& table = tableFor(center);
    Viewport vp{center, rays_.fov(), RgbImage(rays_.width(), rays_.height())};
    auto out = vp.pixels.pixels();
    const double lon0 = center.lon();
    for (std::size_t k = 0; k < out.size(); ++k) out[k] = img.sample(table.lat[k], lon0 + table.dlon[k]);
    return vp;
  }

 private:
  struct Table {
    std::vector<double> lat;
    std::vector<double> dlon;
  };

  const Table& tableFor(const SphereCoord& center) const {
    std::lock_guard lock(mutex_);
    auto& slot = tables_[center.lat()];
    if (!slot) {
      auto table = std::make_unique<Table>();
      const std::size_t n = static_cast<std::size_t>(rays_.width()) * static_cast<std::size_t>(rays_.height());
      table->lat.resize(n);
      table->dlon.resize(n);
      const TangentFrame frame(SphereCoord(center.lat(), 0.0));
      std::size_t k = 0;
      for (int i = 0; i < rays_.height(); ++i) {
        for (int j = 0; j < rays_.width(); ++j, ++k) {
          const auto [lat, dlon] = frame.inverseRaw(rays_.x(j), rays_.y(i));
          table->lat[k] = lat;
          table->dlon[k] = dlon;
        }
      }
      slot = std::move(table);
    }
    return *slot;
  }

  ViewportRays rays_;
  mutable std::mutex mutex_;
  mutable std::map<double, std::unique_ptr<const Table>> tables_;
};

/// Rectilinear viewport of `width` x `height` pixels centered at `center`.
inline Viewport extractViewport(const ErpImage& img, const SphereCoord& center, const FieldOfView& fov,
                                int width, int height) {
  return extractViewport(img, center, ViewportRays(fov, width, height));
}

inline Viewport extractViewport(const ErpImage& img, const SphereCoord& center, const FieldOfView& fov,
                                int size) {
  return extractViewport(img, center, fov, size, size);
}

/// Central patch plus eight neighbour patches in Direction order.
struct PatchGrid {
  GrayImage center;
  std::array<GrayImage, kNumDirections> neighbors;
};

namespace detail {

/// (grid row, grid col) of each direction's patch in the 3x3 layout.
inline constexpr std::array<std::array<int, 2>, kNumDirections> kPatchCells = {{
    {0, 1}, {0, 2}, {1, 2}, {2, 2}, {2, 1}, {2, 0}, {1, 0}, {0, 0},
}};

inline GrayImage crop(const GrayImage& src, int top, int left, int height, int width) {
  GrayImage out(width, height);
  for (int r = 0; r < height; ++r) {
    auto line = src.row(top + r).subspan(static_cast<std::size_t>(left), static_cast<std::size_t>(width));
    std::copy(line.begin(), line.end(), out.pixels().begin() + static_cast<std::ptrdiff_t>(r) * width);
  }
  return out;
}

}  // namespace detail

/// 3x3 grid of half-size grayscale patches at quarter-size stride.
inline PatchGrid splitPatches(const GrayImage& gray) {
  const int w = gray.width();
  const int h = gray.height();
  if (w < 4 || h < 4 || w % 4 != 0 || h % 4 != 0) {
    throw Error(ErrorKind::IndivisibleSize, "viewport " + std::to_string(w) + "x" + std::to_string(h) +
                                                " is not divisible by 4");
  }
  const int ph = h / 2, pw = w / 2, sy = h / 4, sx = w / 4;
  PatchGrid grid;
  grid.center = detail::crop(gray, sy, sx, ph, pw);
  for (int k = 0; k < kNumDirections; ++k) {
    const auto [gr, gc] = detail::kPatchCells[static_cast<std::size_t>(k)];
    grid.neighbors[static_cast<std::size_t>(k)] = detail::crop(gray, gr * sy, gc * sx, ph, pw);
  }
  return grid;
}

inline PatchGrid splitPatches(const Viewport& vp) { return splitPatches(toGray(vp.pixels)); }

/// Shannon entropy (bits) of the 256-bin gray-level histogram.
inline double grayEntropy(std::span<const std::uint8_t> pixels) {
  if (pixels.empty()) throw Error(ErrorKind::EmptyPatch, "entropy of an empty patch");
  std::array<std::size_t, 256> hist{};
  for (auto v : pixels) ++hist[v];
  const double n = static_cast<double>(pixels.size());
  double entropy = 0.0;
  for (auto count : hist) {
    if (count == 0) continue;
    const double p = static_cast<double>(count) / n;
    entropy -= p * std::log2(p);
  }
  return entropy;
}

inline double grayEntropy(const GrayImage& patch) { return grayEntropy(patch.pixels()); }

}  // namespace panoview
