#include "streamstab/spatial_refine.hpp"

#include "stats.hpp"
#include "streamstab/errors.hpp"

#include <cmath>

namespace streamstab {

namespace {

constexpr double kWeightUnderflow = 1e-300;

void check_shape(const DepthMap& map) {
  const auto n = map.width * map.height;
  if (map.depths.size() != n || map.valid.size() != n) {
    throw Error(ErrorCode::InvalidArgument, "depth map buffers do not match its size");
  }
}

Vec3 back_project(double u, double v, double d, const Intrinsics& k) {
  return {(u - k.cx) * d / k.fx, (v - k.cy) * d / k.fy, d};
}

}  // namespace

std::size_t DepthMap::valid_count() const {
  std::size_t n = 0;
  for (auto v : valid) n += v != 0;
  return n;
}

double effective_sigma_r(const DepthMap& map, const BilateralConfig& cfg) {
  if (cfg.sigma_r) return *cfg.sigma_r;
  std::vector<double> samples;
  samples.reserve(map.depths.size());
  for (std::size_t i = 0; i < map.depths.size(); ++i) {
    if (map.valid[i]) samples.push_back(map.depths[i]);
  }
  if (samples.empty()) throw Error(ErrorCode::NoValidPixels, "depth map has no valid pixels");
  return cfg.adaptive_sigma_r_factor * detail::median(std::move(samples));
}

DepthMap bilateral_depth(const DepthMap& map, const BilateralConfig& cfg) {
  check_shape(map);
  if (cfg.window < 1 || !(cfg.sigma_s > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "bilateral filter needs window >= 1 and sigma_s > 0");
  }
  if (map.valid_count() == 0) throw Error(ErrorCode::NoValidPixels, "depth map has no valid pixels");
  const bool projected = cfg.distance == BilateralConfig::Distance::BackProjected;
  if (projected && !cfg.intrinsics) {
    throw Error(ErrorCode::InvalidArgument, "back-projected distance needs intrinsics");
  }
  const double sigma_r = effective_sigma_r(map, cfg);
  if (!(sigma_r > 0.0)) throw Error(ErrorCode::InvalidArgument, "sigma_r must be positive");

  const double inv_2ss = 1.0 / (2.0 * cfg.sigma_s * cfg.sigma_s);
  const double inv_2sr = 1.0 / (2.0 * sigma_r * sigma_r);
  const auto w = static_cast<long>(map.width);
  const auto h = static_cast<long>(map.height);
  const long win = cfg.window;

  DepthMap out = map;
  for (long y = 0; y < h; ++y) {
    for (long x = 0; x < w; ++x) {
      const auto center = map.index(static_cast<std::size_t>(x), static_cast<std::size_t>(y));
      if (!map.valid[center]) continue;
      const double dp = map.depths[center];
      const Vec3 pp = projected ? back_project(x, y, dp, *cfg.intrinsics) : Vec3::Zero();

      double weight_sum = 0.0;
      double value_sum = 0.0;
      for (long qy = std::max(0L, y - win); qy <= std::min(h - 1, y + win); ++qy) {
        for (long qx = std::max(0L, x - win); qx <= std::min(w - 1, x + win); ++qx) {
          const auto qi = map.index(static_cast<std::size_t>(qx), static_cast<std::size_t>(qy));
          if (!map.valid[qi]) continue;
          const double dq = map.depths[qi];
          double dist2;
          if (projected) {
            dist2 = (back_project(qx, qy, dq, *cfg.intrinsics) - pp).squaredNorm();
          } else {
            const double dx = static_cast<double>(qx - x);
            const double dy = static_cast<double>(qy - y);
            dist2 = dx * dx + dy * dy;
          }
          const double diff = dp - dq;
          const double weight = std::exp(-dist2 * inv_2ss) * std::exp(-diff * diff * inv_2sr);
          weight_sum += weight;
          value_sum += weight * (cfg.average == BilateralConfig::Average::Neighbor ? dq : dp);
        }
      }
      if (weight_sum >= kWeightUnderflow) out.depths[center] = value_sum / weight_sum;
    }
  }
  return out;
}

PointSet depth_to_points(const DepthMap& map, const Intrinsics& k) {
  check_shape(map);
  if (!(k.fx > 0.0) || !(k.fy > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "focal lengths must be positive");
  }
  PointSet out;
  out.points.reserve(map.valid_count());
  for (std::size_t y = 0; y < map.height; ++y) {
    for (std::size_t x = 0; x < map.width; ++x) {
      if (!map.is_valid(x, y)) continue;
      out.points.push_back(back_project(static_cast<double>(x), static_cast<double>(y),
                                        map.depth(x, y), k));
    }
  }
  return out;
}

PointSet refine_cloud(const DepthMap& map, const Intrinsics& k, const BilateralConfig& cfg) {
  return depth_to_points(bilateral_depth(map, cfg), k);
}

}  // namespace streamstab
