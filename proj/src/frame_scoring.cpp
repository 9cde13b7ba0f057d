#include "streamstab/frame_scoring.hpp"

#include "streamstab/errors.hpp"
#include "streamstab/fft.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace streamstab {

namespace {

void check_image(const GrayImage& img) {
  if (img.width == 0 || img.height == 0 || img.pixels.size() != img.width * img.height) {
    throw Error(ErrorCode::EmptyImage, "image has no pixels");
  }
}

double image_ratio(const GrayImage& img, const ScoreConfig& cfg) {
  check_image(img);
  const double r = cfg.radius_for(img.width, img.height);
  const double limit = 0.5 * static_cast<double>(std::min(img.width, img.height));
  if (!(r > 0.0) || !(r < limit)) {
    throw Error(ErrorCode::InvalidRadius,
                "radius " + std::to_string(r) + " must lie in (0, min(W,H)/2)");
  }
  return highfreq_ratio(dft2_magnitude_centered(img), r, cfg.epsilon);
}

}  // namespace

double ScoreConfig::radius_for(std::size_t width, std::size_t height) const {
  if (radius) return *radius;
  return std::max(1.0, std::floor(static_cast<double>(std::min(width, height)) / 8.0));
}

GrayImage to_grayscale(const RgbImage& rgb) {
  const auto n = rgb.width * rgb.height;
  if (n == 0 || rgb.channels.size() != 3 * n) {
    throw Error(ErrorCode::EmptyImage, "RGB image has no pixels");
  }
  GrayImage out(rgb.width, rgb.height);
  for (std::size_t i = 0; i < n; ++i) {
    const double* px = &rgb.channels[3 * i];
    out.pixels[i] = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
  }
  return out;
}

Spectrum dft2_magnitude_centered(const GrayImage& img) {
  check_image(img);
  const auto w = img.width;
  const auto h = img.height;
  // Transform img − img[0] and put the offset back into the DC bin
  // analytically, so a constant image has an exactly DC-only spectrum at any
  // size.
  const double offset = img.pixels[0];
  std::vector<fft::Complex> buf(w * h);
  for (std::size_t i = 0; i < buf.size(); ++i) buf[i] = img.pixels[i] - offset;
  fft::forward_2d(buf, w, h);
  buf[0] += offset * static_cast<double>(w * h);

  // Bin (u, v) moves to ((u + ⌊w/2⌋) mod w, (v + ⌊h/2⌋) mod h).
  Spectrum spec{w, h, std::vector<double>(w * h)};
  const auto sx = w / 2;
  const auto sy = h / 2;
  for (std::size_t v = 0; v < h; ++v) {
    const auto y = (v + sy) % h;
    for (std::size_t u = 0; u < w; ++u) {
      const auto c = buf[v * w + u];
      spec.magnitudes[y * w + (u + sx) % w] = std::sqrt(std::norm(c));
    }
  }
  return spec;
}

double highfreq_ratio(const Spectrum& spec, double radius, double epsilon) {
  if (!(radius > 0.0)) throw Error(ErrorCode::InvalidRadius, "radius must be positive");
  const auto cx = static_cast<double>(spec.width / 2);
  const auto cy = static_cast<double>(spec.height / 2);
  const double r2 = radius * radius;
  double total = 0.0;
  double high = 0.0;
  for (std::size_t y = 0; y < spec.height; ++y) {
    const double v = static_cast<double>(y) - cy;
    for (std::size_t x = 0; x < spec.width; ++x) {
      const double u = static_cast<double>(x) - cx;
      const double f = spec.at(x, y);
      total += f;
      if (u * u + v * v > r2) high += f;
    }
  }
  return high / (total + epsilon);
}

double quality_score(double ratio, double gain, double midpoint) {
  return 1.0 / (1.0 + std::exp(-gain * (ratio - midpoint)));
}

double motion_score(double delta_x, double delta_q, double w1, double w2) {
  if (delta_x < 0.0 || delta_q < 0.0) {
    throw Error(ErrorCode::NegativeMagnitude, "pose change magnitudes must be nonnegative");
  }
  return w1 * delta_x + w2 * delta_q;
}

double adaptive_update_weight(double s1, double s2, double clip_max) {
  return std::min(s1 * s2, clip_max);
}

FrameScore score_frame_detailed(const Pose& prev, const Pose& cur, const GrayImage& img,
                                const ScoreConfig& cfg) {
  FrameScore s;
  const auto motion = relative_pose(prev, cur);
  s.delta_x = motion.delta_t.norm();
  s.delta_q = motion.delta_angle;
  s.s1 = motion_score(s.delta_x, s.delta_q, cfg.w1, cfg.w2);
  s.ratio = image_ratio(img, cfg);
  s.s2 = quality_score(s.ratio, cfg.sigmoid_gain, cfg.sigmoid_midpoint);
  s.weight = adaptive_update_weight(s.s1, s.s2, cfg.clip_max);
  return s;
}

FrameScore score_first_frame_detailed(const GrayImage& img, const ScoreConfig& cfg) {
  FrameScore s;
  s.ratio = image_ratio(img, cfg);
  s.s2 = quality_score(s.ratio, cfg.sigmoid_gain, cfg.sigmoid_midpoint);
  s.weight = cfg.initial_weight;
  return s;
}

double score_frame(const Pose& prev, const Pose& cur, const GrayImage& img,
                   const ScoreConfig& cfg) {
  return score_frame_detailed(prev, cur, img, cfg).weight;
}

double score_first_frame(const GrayImage& img, const ScoreConfig& cfg) {
  return score_first_frame_detailed(img, cfg).weight;
}

}  // namespace streamstab
