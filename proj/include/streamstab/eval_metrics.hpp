#pragma once

// Benchmark-style evaluation: trajectory ATE/RPE after alignment, depth
// Abs Rel / δ<1.25 under three alignment modes, and point-cloud
// accuracy / completeness / normal consistency.
//
// These are evaluation metrics, not the training losses in
// trajectory_losses.hpp: ATE here ignores rotation and RPE composes proper
// rigid-body relative motions.

#include "streamstab/geometry.hpp"
#include "streamstab/nearest_neighbor.hpp"
#include "streamstab/spatial_refine.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace streamstab {

struct Similarity3 {
  double scale = 1.0;
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return scale * (rotation * p) + translation; }
};

/// Least-squares s, R, t with s·R·src + t ≈ dst (Umeyama). `with_scale`
/// false pins s = 1. Throws LengthMismatch, DegenerateConfiguration (fewer
/// than three points or a rank-deficient cross-covariance).
Similarity3 umeyama_align(std::span<const Vec3> src, std::span<const Vec3> dst, bool with_scale);

/// Translation RMSE after aligning predicted positions onto ground truth.
double metric_ate(const Trajectory& pred, const Trajectory& gt, bool with_scale);

struct RpeResult {
  double trans = 0.0;    // RMSE of relative translation error, scene units
  double rot_deg = 0.0;  // RMSE of relative rotation error, degrees
};

/// Consecutive-frame relative pose error. Throws TooShort, LengthMismatch.
RpeResult metric_rpe(const Trajectory& pred, const Trajectory& gt);

enum class DepthEvalMode { Original, Scale, ScaleAndShift };

const char* to_string(DepthEvalMode mode);
/// Accepts "original", "scale", "scale_and_shift". Throws InvalidArgument.
DepthEvalMode parse_depth_eval_mode(const std::string& text);

struct DepthMetrics {
  double abs_rel = 0.0;
  double delta_125 = 0.0;  // percent
};

/// Evaluated over pixels valid in both maps. Throws ShapeMismatch,
/// NoOverlappingValidity.
DepthMetrics metric_depth(const DepthMap& pred, const DepthMap& gt, DepthEvalMode mode);

/// Local-PCA normals over each point and its k nearest neighbors, oriented
/// toward the origin.
std::vector<Vec3> estimate_normals(std::span<const Vec3> points, std::size_t k,
                                   NeighborIndex::Strategy strategy = NeighborIndex::Strategy::Auto);

struct ReconMetrics {
  double acc = 0.0;
  double comp = 0.0;
  double nc = 0.0;
};

/// Clouds must already share a frame. Throws TooFewPoints when either cloud
/// has at most k_normals points.
ReconMetrics metric_recon(const PointSet& pred, const PointSet& gt, std::size_t k_normals = 16,
                          NeighborIndex::Strategy strategy = NeighborIndex::Strategy::Auto);

}  // namespace streamstab
