#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "panoview/error.hpp"

// Angles are degrees at every API boundary; radians only inside functions.

namespace panoview {

inline constexpr double kDegToRad = std::numbers::pi / 180.0;
inline constexpr double kRadToDeg = 180.0 / std::numbers::pi;

/// Position on the unit sphere. Latitude is clamped to [-90, 90] and
/// longitude wrapped into [-180, 180) on construction.
class SphereCoord {
 public:
  constexpr SphereCoord() = default;

  SphereCoord(double lat, double lon) {
    if (!std::isfinite(lat) || !std::isfinite(lon)) {
      throw Error(ErrorKind::InvalidCoordinate,
                  "non-finite coordinate (" + std::to_string(lat) + ", " + std::to_string(lon) + ")");
    }
    lat_ = lat < -90.0 ? -90.0 : (lat > 90.0 ? 90.0 : lat);
    double wrapped = std::fmod(lon + 180.0, 360.0);
    if (wrapped < 0.0) wrapped += 360.0;
    lon_ = wrapped - 180.0;
    if (lon_ >= 180.0) lon_ = -180.0;
  }

  constexpr double lat() const noexcept { return lat_; }
  constexpr double lon() const noexcept { return lon_; }

  friend constexpr bool operator==(const SphereCoord&, const SphereCoord&) = default;

 private:
  double lat_ = 0.0;
  double lon_ = 0.0;
};

inline SphereCoord normalize(double lat, double lon) { return SphereCoord(lat, lon); }
inline SphereCoord normalize(const SphereCoord& c) { return SphereCoord(c.lat(), c.lon()); }

struct TransitionStep {
  double dLat = 24.0;
  double dLon = 24.0;
};

struct FieldOfView {
  double horizontal = 110.0;
  double vertical = 110.0;

  void validate() const {
    auto ok = [](double v) { return std::isfinite(v) && v > 0.0 && v < 180.0; };
    if (!ok(horizontal) || !ok(vertical)) {
      throw Error(ErrorKind::InvalidConfig, "field of view must lie strictly inside (0, 180) degrees");
    }
  }
};

struct PlanePoint {
  double x = 0.0;
  double y = 0.0;
};

/// Moore-neighbourhood directions in fixed order; index semantics are part
/// of the sequence file format.
enum class Direction : int { N = 0, NE, E, SE, S, SW, W, NW };

inline constexpr int kNumDirections = 8;

/// (lat sign, lon sign) per direction index.
inline constexpr std::array<std::array<int, 2>, kNumDirections> kDirectionOffsets = {{
    {+1, 0}, {+1, +1}, {0, +1}, {-1, +1}, {-1, 0}, {-1, -1}, {0, -1}, {+1, -1},
}};

inline constexpr std::array<const char*, kNumDirections> kDirectionNames = {
    "N", "NE", "E", "SE", "S", "SW", "W", "NW"};

using NeighborSet = std::array<SphereCoord, kNumDirections>;

inline SphereCoord stepToward(const SphereCoord& center, const TransitionStep& step, int direction) {
  const auto& off = kDirectionOffsets.at(static_cast<std::size_t>(direction));
  return SphereCoord(center.lat() + off[0] * step.dLat, center.lon() + off[1] * step.dLon);
}

inline NeighborSet neighborCoords(const SphereCoord& center, const TransitionStep& step) {
  if (!std::isfinite(step.dLat) || !std::isfinite(step.dLon)) {
    throw Error(ErrorKind::InvalidConfig, "transition step must be finite");
  }
  NeighborSet out;
  for (int k = 0; k < kNumDirections; ++k) out[static_cast<std::size_t>(k)] = stepToward(center, step, k);
  return out;
}

/// Gnomonic projection onto the plane tangent at `center`. x points east,
/// y points north, both in tangent units (tan of the angular offset).
inline PlanePoint gnomonicForward(const SphereCoord& center, const SphereCoord& point) {
  const double phi0 = center.lat() * kDegToRad;
  const double phi = point.lat() * kDegToRad;
  const double dlam = (point.lon() - center.lon()) * kDegToRad;
  const double cosPhi = std::cos(phi);
  const double sinPhi = std::sin(phi);
  const double cosDlam = std::cos(dlam);
  const double cosc = std::sin(phi0) * sinPhi + std::cos(phi0) * cosPhi * cosDlam;
  // cos(90 deg) evaluates to ~6e-17 rather than 0.
  if (!(cosc > 1e-12)) {
    throw Error(ErrorKind::OutsideHemisphere, "point is 90 degrees or more from the projection center");
  }
  return {cosPhi * std::sin(dlam) / cosc,
          (std::cos(phi0) * sinPhi - std::sin(phi0) * cosPhi * cosDlam) / cosc};
}

/// Precomputed tangent frame for repeated inverse projections about one center.
/// Longitude is reconstructed as center.lon + relative offset so that frames
/// differing only by a longitude rotation produce identical relative geometry.
class TangentFrame {
 public:
  explicit TangentFrame(const SphereCoord& center)
      : lon0_(center.lon()),
        sin0_(std::sin(center.lat() * kDegToRad)),
        cos0_(std::cos(center.lat() * kDegToRad)) {}

  /// Returns (lat, lon) in degrees; lon is not wrapped.
  std::array<double, 2> inverseRaw(double x, double y) const noexcept {
    // Frame with the center on the prime meridian: c = (cos0, 0, sin0),
    // east = (0, 1, 0), north = (-sin0, 0, cos0).
    const double px = cos0_ - y * sin0_;
    const double py = x;
    const double pz = sin0_ + y * cos0_;
    const double lat = std::atan2(pz, std::sqrt(px * px + py * py)) * kRadToDeg;
    const double dlon = std::atan2(py, px) * kRadToDeg;
    return {lat, lon0_ + dlon};
  }

  SphereCoord inverse(const PlanePoint& p) const {
    const auto [lat, lon] = inverseRaw(p.x, p.y);
    return SphereCoord(lat, lon);
  }

 private:
  double lon0_;
  double sin0_;
  double cos0_;
};

inline SphereCoord gnomonicInverse(const SphereCoord& center, const PlanePoint& plane) {
  if (!std::isfinite(plane.x) || !std::isfinite(plane.y)) {
    throw Error(ErrorKind::InvalidCoordinate, "non-finite plane coordinate");
  }
  return TangentFrame(center).inverse(plane);
}

/// Central angle in degrees, via atan2(|a x b|, a . b) which stays accurate
/// for both tiny and near-antipodal separations. Arguments are put in a
/// canonical order so the result is exactly symmetric.
inline double greatCircleDeg(SphereCoord a, SphereCoord b) {
  if (b.lat() < a.lat() || (b.lat() == a.lat() && b.lon() < a.lon())) std::swap(a, b);
  const double phi1 = a.lat() * kDegToRad;
  const double phi2 = b.lat() * kDegToRad;
  const double dlam = (b.lon() - a.lon()) * kDegToRad;
  const double c1 = std::cos(phi1), s1 = std::sin(phi1);
  const double c2 = std::cos(phi2), s2 = std::sin(phi2);
  const double cd = std::cos(dlam), sd = std::sin(dlam);
  const double cx = c2 * sd;
  const double cy = c1 * s2 - s1 * c2 * cd;
  const double cross = std::hypot(cx, cy);
  const double dot = s1 * s2 + c1 * c2 * cd;
  return std::atan2(cross, dot) * kRadToDeg;
}

}  // namespace panoview
