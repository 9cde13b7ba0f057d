#pragma once

// Trajectory-consistent training objectives: confidence-weighted point
// regression, RGB reconstruction, and a pose loss built from absolute error,
// relative (frame-to-frame) error, and an acceleration penalty.
//
// Relative and acceleration terms operate on raw quaternion components after
// hemisphere-aligning each sequence, so q/−q flips do not register as motion.

#include "streamstab/geometry.hpp"

#include <span>
#include <vector>

namespace streamstab {

struct LossWeights {
  double w_ate = 1.0;
  double w_rpe = 1.0;
  double w_acc = 1.0;
  double lambda_conf = 1.0;
  double lambda_rgb = 1.0;
  double lambda_pose = 1.0;
  double alpha_conf = 0.2;
};

/// Mean Euclidean norm, floored at 1e-8. Throws EmptyList.
double scale_normalizer(std::span<const Vec3> vectors);

/// Σ c·‖p̂/ŝ − p/s‖ − α·log c. Throws LengthMismatch, MissingConfidence.
double loss_conf(const PointSet& pred, const PointSet& gt, double alpha);

/// Squared L2 distance of two equally shaped rasters. Throws ShapeMismatch.
double loss_rgb(std::span<const double> pred, std::span<const double> gt);

double loss_ate(const Trajectory& pred, const Trajectory& gt);
/// Needs N ≥ 2. Throws TooShort, LengthMismatch.
double loss_rpe(const Trajectory& pred, const Trajectory& gt);
/// Needs N ≥ 3. Throws TooShort.
double loss_acc(const Trajectory& pred);

/// w_ate·ATE + w_rpe·RPE + w_acc·ACC; terms with zero weight are skipped, so
/// short trajectories are fine as long as the terms they cannot support are
/// switched off.
double loss_pose(const Trajectory& pred, const Trajectory& gt, const LossWeights& w);

double loss_total(double conf, double rgb, double pose, const LossWeights& w);

/// ∂loss_pose/∂x̂_t for every predicted translation. Scale normalizers are
/// held constant and zero-norm residuals contribute a zero subgradient.
std::vector<Vec3> grad_pose_translations(const Trajectory& pred, const Trajectory& gt,
                                         const LossWeights& w);

}  // namespace streamstab
