// Writes the deterministic fixture set used by the CLI tests.
//
//   make_fixtures <output-dir>
//
// Trajectories are a 30 fps circle (radius 2) with a gentle vertical wave,
// yaw following the direction of travel; the noisy copy adds σ = 0.05
// translation noise and ~0.01 rad rotation noise. Depth maps are 64×48 with a
// box (depth 1.5) in front of a wall (depth 3); intrinsics fx = fy = 60,
// cx = 32, cy = 24.

#include "streamstab/io_formats.hpp"
#include "streamstab/spatial_refine.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <random>

using namespace streamstab;
namespace fs = std::filesystem;

namespace {

Trajectory circle(std::size_t frames) {
  Trajectory t;
  for (std::size_t i = 0; i < frames; ++i) {
    const double s = static_cast<double>(i) / 30.0;
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(i) / 240.0;
    Pose p;
    p.timestamp = s;
    p.t = Vec3(2.0 * std::cos(phase), 2.0 * std::sin(phase), 0.1 * std::sin(3.0 * phase));
    p.q = Quaternion::from_axis_angle(Vec3::UnitZ(), phase + std::numbers::pi / 2.0);
    t.poses.push_back(p);
  }
  return t;
}

Trajectory add_noise(const Trajectory& clean, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Trajectory out = clean;
  for (auto& p : out.poses) {
    p.t += 0.05 * Vec3(n(rng), n(rng), n(rng));
    const Vec3 axis(n(rng), n(rng), n(rng));
    p.q = quat_normalize(p.q * Quaternion::from_axis_angle(axis, 0.01 * std::abs(n(rng))));
  }
  return out;
}

GrayImage frame(std::size_t index, std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  GrayImage img(64, 48);
  const double texture = 0.02 + 0.02 * static_cast<double>(index % 10);
  for (std::size_t y = 0; y < img.height; ++y) {
    for (std::size_t x = 0; x < img.width; ++x) {
      const double base = 0.3 + 0.4 * static_cast<double>(x) / 63.0;
      img.at(x, y) = std::clamp(base + texture * n(rng), 0.0, 1.0);
    }
  }
  return img;
}

DepthMap box_scene() {
  DepthMap d(64, 48, 3.0);
  for (std::size_t y = 14; y < 34; ++y) {
    for (std::size_t x = 20; x < 44; ++x) d.set(x, y, 1.5);
  }
  d.set(0, 0, 0.0);  // one invalid pixel
  return d;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_fixtures <output-dir>\n";
    return 2;
  }
  const fs::path dir = argv[1];
  fs::create_directories(dir / "frames");
  std::mt19937_64 rng(20240601);

  const auto gt = circle(120);
  io::write_file(dir / "traj_gt.tum", io::write_trajectory_tum(gt));
  io::write_file(dir / "traj_noisy.tum", io::write_trajectory_tum(add_noise(gt, rng)));

  const auto short_traj = add_noise(circle(30), rng);
  io::write_file(dir / "score_traj.tum", io::write_trajectory_tum(short_traj));
  for (std::size_t i = 0; i < short_traj.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof(name), "frame_%03zu.pgm", i);
    io::write_file(dir / "frames" / name, io::write_pgm(frame(i, rng)));
  }

  const auto depth = box_scene();
  io::write_file(dir / "depth_gt.pfm", io::write_pfm(depth));
  std::normal_distribution<double> n(0.0, 0.02);
  DepthMap noisy = depth;
  DepthMap scaled = depth;
  for (std::size_t i = 0; i < depth.depths.size(); ++i) {
    if (!depth.valid[i]) continue;
    noisy.depths[i] += n(rng);
    scaled.depths[i] *= 1.3;
  }
  io::write_file(dir / "depth_noisy.pfm", io::write_pfm(noisy));
  io::write_file(dir / "depth_scaled.pfm", io::write_pfm(scaled));
  io::write_file(dir / "depth_const.pfm", io::write_pfm(DepthMap(16, 16, 2.0)));
  DepthMap step(32, 32, 1.0);
  for (std::size_t y = 0; y < 32; ++y) {
    for (std::size_t x = 16; x < 32; ++x) step.set(x, y, 10.0);
  }
  io::write_file(dir / "depth_step.pfm", io::write_pfm(step));

  const Intrinsics k{60.0, 60.0, 32.0, 24.0};
  // Back-project the float32 maps as stored on disk.
  const auto gt_cloud = depth_to_points(io::read_pfm(io::write_pfm(depth)), k);
  auto pred_cloud = depth_to_points(io::read_pfm(io::write_pfm(noisy)), k);
  std::uniform_real_distribution<double> conf(0.5, 2.0);
  auto& c = pred_cloud.confidences.emplace();
  for (std::size_t i = 0; i < pred_cloud.size(); ++i) c.push_back(conf(rng));
  io::write_file(dir / "cloud_gt.ply", io::write_ply_ascii(gt_cloud));
  io::write_file(dir / "cloud_pred.ply", io::write_ply_ascii(pred_cloud));
  return 0;
}
