#pragma once

// Edge-preserving bilateral filtering of depth maps and back-projection to
// point clouds.

#include "streamstab/geometry.hpp"

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

namespace streamstab {

/// Row-major depth raster. Valid pixels hold finite, positive depths; other
/// pixels are ignored by every consumer.
struct DepthMap {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> depths;
  std::vector<std::uint8_t> valid;

  DepthMap() = default;
  DepthMap(std::size_t w, std::size_t h, double fill = 0.0)
      : width(w), height(h), depths(w * h, fill), valid(w * h, fill > 0.0 ? 1 : 0) {}

  std::size_t index(std::size_t x, std::size_t y) const { return y * width + x; }
  double depth(std::size_t x, std::size_t y) const { return depths[index(x, y)]; }
  bool is_valid(std::size_t x, std::size_t y) const { return valid[index(x, y)] != 0; }
  void set(std::size_t x, std::size_t y, double d) {
    depths[index(x, y)] = d;
    valid[index(x, y)] = (std::isfinite(d) && d > 0.0) ? 1 : 0;
  }
  std::size_t valid_count() const;
};

struct Intrinsics {
  double fx = 1.0;
  double fy = 1.0;
  double cx = 0.0;
  double cy = 0.0;
};

struct BilateralConfig {
  /// Which depth the range-weighted sum averages. `Neighbor` is the usual
  /// bilateral filter; `Center` multiplies every weight by the center depth,
  /// which reduces the filter to the identity and exists for comparison only.
  enum class Average { Neighbor, Center };
  /// Spatial distance between pixels: image-plane pixels, or scene units
  /// between back-projected points (requires `intrinsics`).
  enum class Distance { Pixel, BackProjected };

  int window = 2;        // half-width; the neighborhood is (2w+1)²
  double sigma_s = 1.5;  // pixels, or scene units for BackProjected
  /// Fixed range sigma in depth units; unset means
  /// adaptive_sigma_r_factor × median valid depth.
  std::optional<double> sigma_r;
  double adaptive_sigma_r_factor = 0.05;
  Average average = Average::Neighbor;
  Distance distance = Distance::Pixel;
  std::optional<Intrinsics> intrinsics;
};

/// Range sigma actually used for `map`.
double effective_sigma_r(const DepthMap& map, const BilateralConfig& cfg);

/// Throws NoValidPixels, InvalidArgument (bad config / shape).
DepthMap bilateral_depth(const DepthMap& map, const BilateralConfig& cfg);

/// Pinhole back-projection of every valid pixel, row-major order.
PointSet depth_to_points(const DepthMap& map, const Intrinsics& k);

PointSet refine_cloud(const DepthMap& map, const Intrinsics& k, const BilateralConfig& cfg);

}  // namespace streamstab
