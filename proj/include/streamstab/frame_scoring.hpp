#pragma once

// Pose-adaptive update weight for a streaming state: a motion score from the
// inter-frame pose change, a structural quality score from the share of
// high-frequency spectral magnitude, and their clipped product.

#include "streamstab/geometry.hpp"

#include <cstddef>
#include <optional>
#include <vector>

namespace streamstab {

/// Row-major grayscale raster with values in [0, 1].
struct GrayImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> pixels;

  GrayImage() = default;
  GrayImage(std::size_t w, std::size_t h, double fill = 0.0)
      : width(w), height(h), pixels(w * h, fill) {}

  double& at(std::size_t x, std::size_t y) { return pixels[y * width + x]; }
  double at(std::size_t x, std::size_t y) const { return pixels[y * width + x]; }
};

/// Row-major interleaved RGB raster, channels in [0, 1].
struct RgbImage {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> channels;  // size 3·width·height
};

/// Centered magnitude spectrum; the DC bin sits at (width/2, height/2).
struct Spectrum {
  std::size_t width = 0;
  std::size_t height = 0;
  std::vector<double> magnitudes;

  double at(std::size_t x, std::size_t y) const { return magnitudes[y * width + x]; }
};

struct ScoreConfig {
  double w1 = 1.0;  // translation weight
  double w2 = 1.0;  // rotation weight (per radian)
  /// High-pass radius in pixels; unset means max(1, ⌊min(W, H) / 8⌋).
  std::optional<double> radius;
  double sigmoid_gain = 20.0;
  double sigmoid_midpoint = 0.1;
  double epsilon = 1e-8;
  double clip_max = 1.0;
  /// Weight returned for the first frame of a stream.
  double initial_weight = 1.0;

  double radius_for(std::size_t width, std::size_t height) const;
};

/// BT.601 luma. Throws EmptyImage.
GrayImage to_grayscale(const RgbImage& rgb);

Spectrum dft2_magnitude_centered(const GrayImage& img);

/// Share of spectral magnitude strictly outside the disk of `radius` around
/// the DC bin: Σ F·M / (Σ F + ε). Throws InvalidRadius for radius ≤ 0.
double highfreq_ratio(const Spectrum& spec, double radius, double epsilon = 1e-8);

/// Logistic map of the high-frequency ratio, 1 / (1 + exp(−gain·(R − midpoint))).
double quality_score(double ratio, double gain = 20.0, double midpoint = 0.1);

/// w1·Δx + w2·Δq. Throws NegativeMagnitude.
double motion_score(double delta_x, double delta_q, double w1, double w2);

/// min(s1·s2, clip_max).
double adaptive_update_weight(double s1, double s2, double clip_max = 1.0);

/// Every intermediate quantity of one scored frame.
struct FrameScore {
  double delta_x = 0.0;
  double delta_q = 0.0;
  double s1 = 0.0;
  double ratio = 0.0;
  double s2 = 0.0;
  double weight = 0.0;
};

FrameScore score_frame_detailed(const Pose& prev, const Pose& cur, const GrayImage& img,
                                const ScoreConfig& cfg);
/// First frame of a stream: motion terms are zero and the weight is
/// `cfg.initial_weight`; image terms are still reported.
FrameScore score_first_frame_detailed(const GrayImage& img, const ScoreConfig& cfg);

double score_frame(const Pose& prev, const Pose& cur, const GrayImage& img,
                   const ScoreConfig& cfg);
double score_first_frame(const GrayImage& img, const ScoreConfig& cfg);

}  // namespace streamstab
