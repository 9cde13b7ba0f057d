#include "streamstab/nearest_neighbor.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

namespace streamstab {

NeighborIndex::NeighborIndex(std::span<const Vec3> points, Strategy strategy)
    : points_(points.begin(), points.end()) {
  grid_ = strategy == Strategy::Grid ||
          (strategy == Strategy::Auto && points_.size() > kBruteForceLimit);
  if (grid_ && !points_.empty()) build_grid();
  if (points_.empty()) grid_ = false;
}

void NeighborIndex::build_grid() {
  Vec3 lo = points_.front();
  Vec3 hi = points_.front();
  for (const auto& p : points_) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const Vec3 extent = hi - lo;
  std::vector<double> spans;
  for (int a = 0; a < 3; ++a) {
    if (extent[a] > 0.0) spans.push_back(extent[a]);
  }
  // Aim for about one point per occupied cell over the non-flat axes.
  const double n = static_cast<double>(points_.size());
  double measure = 1.0;
  for (double s : spans) measure *= s;
  cell_ = spans.empty() ? 1.0 : std::pow(measure / n, 1.0 / static_cast<double>(spans.size()));
  if (!(cell_ > 0.0) || !std::isfinite(cell_)) cell_ = 1.0;

  origin_ = lo;
  std::size_t cells = 1;
  for (int a = 0; a < 3; ++a) {
    dims_[a] = std::max(1L, static_cast<long>(std::floor(extent[a] / cell_)) + 1);
    cells *= static_cast<std::size_t>(dims_[a]);
  }

  auto cell_of = [&](const Vec3& p) {
    long c[3];
    for (int a = 0; a < 3; ++a) {
      c[a] = std::clamp(static_cast<long>(std::floor((p[a] - origin_[a]) / cell_)), 0L,
                        dims_[a] - 1);
    }
    return static_cast<std::size_t>((c[2] * dims_[1] + c[1]) * dims_[0] + c[0]);
  };

  cell_start_.assign(cells + 1, 0);
  std::vector<std::size_t> owner(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    owner[i] = cell_of(points_[i]);
    ++cell_start_[owner[i] + 1];
  }
  for (std::size_t c = 0; c < cells; ++c) cell_start_[c + 1] += cell_start_[c];
  cell_items_.resize(points_.size());
  std::vector<std::size_t> fill(cell_start_.begin(), cell_start_.end() - 1);
  for (std::size_t i = 0; i < points_.size(); ++i) cell_items_[fill[owner[i]]++] = i;
}

Neighbor NeighborIndex::nearest(const Vec3& query) const {
  const auto found = k_nearest(query, 1);
  return found.empty() ? Neighbor{} : found.front();
}

std::vector<Neighbor> NeighborIndex::k_nearest(const Vec3& query, std::size_t k) const {
  k = std::min(k, points_.size());
  if (k == 0) return {};
  return grid_ ? grid_k_nearest(query, k) : brute_k_nearest(query, k);
}

std::vector<Neighbor> NeighborIndex::brute_k_nearest(const Vec3& query, std::size_t k) const {
  std::vector<Neighbor> all(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    all[i] = {i, (points_[i] - query).squaredNorm()};
  }
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(k), all.end());
  all.resize(k);
  return all;
}

std::vector<Neighbor> NeighborIndex::grid_k_nearest(const Vec3& query, std::size_t k) const {
  // Unclamped cell coordinate of the query; it may sit outside the grid.
  long qc[3];
  long start_ring = 0;
  long last_ring = 0;
  for (int a = 0; a < 3; ++a) {
    qc[a] = static_cast<long>(std::floor((query[a] - origin_[a]) / cell_));
    const long outside = qc[a] < 0 ? -qc[a] : (qc[a] >= dims_[a] ? qc[a] - dims_[a] + 1 : 0);
    start_ring = std::max(start_ring, outside);
    last_ring = std::max({last_ring, std::abs(qc[a]), std::abs(qc[a] - (dims_[a] - 1))});
  }

  std::priority_queue<Neighbor> best;  // max-heap on (dist2, index)
  auto visit = [&](long cx, long cy, long cz) {
    const auto cell = static_cast<std::size_t>((cz * dims_[1] + cy) * dims_[0] + cx);
    for (auto it = cell_start_[cell]; it < cell_start_[cell + 1]; ++it) {
      const auto i = cell_items_[it];
      const Neighbor cand{i, (points_[i] - query).squaredNorm()};
      if (best.size() < k) {
        best.push(cand);
      } else if (cand < best.top()) {
        best.pop();
        best.push(cand);
      }
    }
  };

  for (long r = start_ring; r <= last_ring; ++r) {
    const long z0 = std::max(0L, qc[2] - r), z1 = std::min(dims_[2] - 1, qc[2] + r);
    const long y0 = std::max(0L, qc[1] - r), y1 = std::min(dims_[1] - 1, qc[1] + r);
    const long x0 = std::max(0L, qc[0] - r), x1 = std::min(dims_[0] - 1, qc[0] + r);
    for (long z = z0; z <= z1; ++z) {
      const bool z_shell = std::abs(z - qc[2]) == r;
      for (long y = y0; y <= y1; ++y) {
        const bool yz_shell = z_shell || std::abs(y - qc[1]) == r;
        if (yz_shell) {
          for (long x = x0; x <= x1; ++x) visit(x, y, z);
        } else {
          // Interior rows only touch the two x faces of the shell.
          if (qc[0] - r >= 0 && qc[0] - r < dims_[0]) visit(qc[0] - r, y, z);
          if (r > 0 && qc[0] + r >= 0 && qc[0] + r < dims_[0]) visit(qc[0] + r, y, z);
        }
      }
    }
    // Every unvisited point is at least r·cell away along some axis.
    if (best.size() == k) {
      const double bound = static_cast<double>(r) * cell_;
      if (best.top().dist2 < bound * bound) break;
    }
  }

  std::vector<Neighbor> out(best.size());
  for (auto i = out.size(); i-- > 0;) {
    out[i] = best.top();
    best.pop();
  }
  return out;
}

}  // namespace streamstab
