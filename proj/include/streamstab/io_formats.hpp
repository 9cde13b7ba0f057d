#pragma once

// Readers and writers for the interchange formats:
//   TUM trajectories  "timestamp tx ty tz qx qy qz qw" (scalar-last on disk)
//   PGM (P2/P5)       grayscale frames, scaled to [0, 1] by maxval
//   PFM ("Pf")        single-channel float depth, bottom-up rows
//   ASCII PLY         x y z [confidence] vertices
//
// Every reader rejects trailing garbage and validates payload sizes before
// allocating.

#include "streamstab/frame_scoring.hpp"
#include "streamstab/geometry.hpp"
#include "streamstab/spatial_refine.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace streamstab::io {

/// Throws ParseError(line) (including all-zero quaternions), NonMonotonicTimestamps(line).
Trajectory read_trajectory_tum(std::string_view text);
std::string write_trajectory_tum(const Trajectory& traj);

/// Throws ParseError, UnsupportedMagic.
GrayImage read_pgm(std::string_view bytes);
/// Binary P5 with maxval 255 (values are rounded and clamped).
std::string write_pgm(const GrayImage& img);

/// Nonpositive or NaN samples become invalid pixels. Throws ParseError,
/// UnsupportedMagic (including color "PF").
DepthMap read_pfm(std::string_view bytes);
/// Little-endian "Pf" with scale −1; invalid pixels are written as 0.
std::string write_pfm(const DepthMap& map);

/// Throws ParseError, MissingProperty.
PointSet read_ply_ascii(std::string_view text);
std::string write_ply_ascii(const PointSet& cloud);

/// Whole-file helpers; throw IoError naming the path.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::string_view contents);

}  // namespace streamstab::io
