#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depthkit/geometry.hpp"
#include "depthkit/image.hpp"

namespace depthkit {

// Textured fronto-parallel rectangle, region in left-image pixel
// coordinates, half-open [x0,x1) x [y0,y1).
struct SceneRect {
  int x0 = 0, y0 = 0, x1 = 0, y1 = 0;
  double depth = 0.0;
  std::uint32_t texture_seed = 0;
};

struct SceneSpec {
  std::vector<SceneRect> rects;
  double background_depth = 40.0;
  double noise_sigma = 0.0;  // additive intensity noise, per image
  int lidar_count = 0;
  std::uint64_t seed = 0;

  void validate(int height, int width) const;
};

// Scene file = scene spec plus the intrinsics it was authored for.
struct SceneFile {
  SceneSpec spec;
  CameraIntrinsics intrinsics;
};

// Plain-text key/value grammar (see docs/formats.md). Throws with a line
// number on malformed input.
SceneFile load_scene(const std::string& path);

struct RenderedScene {
  GrayImage left, right;
  DenseDepthMap gt_depth;
  // 1 when the left pixel is occluded (or out of view) in the right
  // image; such pixels are unmatchable and excluded from statistics.
  std::vector<std::uint8_t> occlusion;
};

// Renders a rectified pair with exact per-pixel ground-truth depth.
// Per-pixel disparity is focal*baseline/depth; the right view samples the
// same continuous band-limited noise textures shifted by it, with
// nearest-surface-wins occlusion handling. Deterministic in (spec, intr).
RenderedScene render_scene(const SceneSpec& spec, const CameraIntrinsics& intr);

// Depth of the visible surface at a pixel (nearest rectangle covering it,
// else the background plane).
double scene_depth(const SceneSpec& spec, int y, int x);

// Uniformly samples ground-truth surface points at pixel centers,
// back-projects them and expresses them in the global frame through the
// inverse of the body/camera pose chain.
std::vector<Point3> sample_lidar(const SceneSpec& spec,
                                 const CameraIntrinsics& intr,
                                 const Pose& body_pose, const Pose& camera_pose,
                                 int count, std::uint64_t seed);

}  // namespace depthkit
