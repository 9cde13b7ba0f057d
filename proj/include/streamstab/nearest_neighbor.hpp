#pragma once

#include "streamstab/geometry.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace streamstab {

struct Neighbor {
  std::size_t index = 0;
  double dist2 = 0.0;  // squared Euclidean distance

  friend bool operator<(const Neighbor& a, const Neighbor& b) {
    return a.dist2 < b.dist2 || (a.dist2 == b.dist2 && a.index < b.index);
  }
};

/// Exact nearest-neighbor queries over a fixed point set. Brute force and the
/// uniform-grid index return identical neighbors: ties on distance resolve
/// to the lower index in both.
class NeighborIndex {
 public:
  enum class Strategy { Auto, BruteForce, Grid };
  static constexpr std::size_t kBruteForceLimit = 2000;

  explicit NeighborIndex(std::span<const Vec3> points, Strategy strategy = Strategy::Auto);

  std::size_t size() const { return points_.size(); }
  bool uses_grid() const { return grid_; }

  Neighbor nearest(const Vec3& query) const;
  /// Up to `k` neighbors in ascending (distance, index) order.
  std::vector<Neighbor> k_nearest(const Vec3& query, std::size_t k) const;

 private:
  std::vector<Neighbor> brute_k_nearest(const Vec3& query, std::size_t k) const;
  std::vector<Neighbor> grid_k_nearest(const Vec3& query, std::size_t k) const;
  void build_grid();

  std::vector<Vec3> points_;
  bool grid_ = false;
  Vec3 origin_ = Vec3::Zero();
  double cell_ = 1.0;
  long dims_[3] = {1, 1, 1};
  std::vector<std::size_t> cell_start_;  // CSR offsets, size cells+1
  std::vector<std::size_t> cell_items_;
};

}  // namespace streamstab
