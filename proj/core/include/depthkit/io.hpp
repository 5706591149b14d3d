#pragma once

#include <string>
#include <vector>

#include "depthkit/geometry.hpp"
#include "depthkit/image.hpp"

namespace depthkit {

// Whitespace-separated "x y z" per line, '#' comments and blank lines
// skipped. Malformed lines raise an error carrying the line number.
std::vector<Point3> load_point_cloud(const std::string& path);
void write_point_cloud(const std::string& path, const std::vector<Point3>& pts);

struct PoseRecord {
  std::string frame_id;
  Point3 translation = Point3::Zero();
  Quaternion quaternion;  // (w, x, y, z) order in files

  Pose pose() const { return Pose{quaternion, translation}; }
};

// One record per file: "id tx ty tz qw qx qy qz". Non-unit quaternions
// are normalized with a warning on stderr.
PoseRecord load_pose(const std::string& path);
void write_pose(const std::string& path, const PoseRecord& rec);

// Key/value text: focal, cx, cy, height, width, baseline. cx/cy default
// to the image center.
CameraIntrinsics load_intrinsics(const std::string& path);
void write_intrinsics(const std::string& path, const CameraIntrinsics& intr);

// Images: binary PGM/PPM and PNG, chosen by magic bytes on read and by
// file extension (.pgm/.ppm/.png) on write. Pixel-exact round trips.
GrayImage read_gray(const std::string& path);
void write_gray(const std::string& path, const GrayImage& img);

RgbImage read_rgb(const std::string& path);
void write_rgb(const std::string& path, const RgbImage& img);

// Depth files: 16-bit single channel, 1/256 m per unit, 0 = invalid.
inline constexpr double kDepthFileScale = 256.0;
DepthMap read_depth(const std::string& path);
void write_depth(const std::string& path, const DepthMap& map);

// Fixed-point encode/decode used by the depth files.
std::uint16_t encode_depth(double meters);       // invalid (NaN) -> 0
double decode_depth(std::uint16_t value);        // 0 -> NaN

}  // namespace depthkit
