#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "depthkit/geometry.hpp"
#include "depthkit/image.hpp"

namespace depthkit {

struct CompletionParams {
  // Completion neighborhood radius: the window is (2*ngrid+1)^2.
  int ngrid = 4;
  // Characteristic-spread window radius. Symmetric window is
  // (2r+1)^2; with spread_asymmetric the offsets run [-(r-1), r],
  // giving an even (2r)^2 window (e.g. r=2 -> 4x4).
  int spread_radius = 1;
  bool spread_asymmetric = false;
  // Pixels closer than this count as "near" and get spread.
  double near_threshold = 15.0;

  void validate() const;
};

struct RasterizeResult {
  SparseDepthMap map;
  std::size_t dropped = 0;  // behind-camera or off-image points
};

// Projects camera-frame points into a sparse depth image. Pixel
// coordinates are rounded half-away-from-zero; collisions keep the
// minimum depth (z-buffer).
RasterizeResult rasterize(std::span<const Point3> points_cam,
                          const CameraIntrinsics& intr);

// Spreads every valid pixel nearer than near_threshold into its window,
// overwriting targets that are invalid or hold a strictly larger depth.
// Near pixels keep their own value. Pure gather over the input map, so
// the result is order-independent.
SparseDepthMap preserve_characteristics(const SparseDepthMap& map,
                                        const CompletionParams& params);

// Normalized inverse-distance (Shepard) completion over the
// (2*ngrid+1)^2 window. Valid measurements are never altered; pixels
// with no valid neighbor stay invalid.
DenseDepthMap complete(const SparseDepthMap& map, const CompletionParams& params);

struct LidarPipelineOptions {
  bool preserve = true;
  bool completion = true;
};

struct LidarPipelineResult {
  DenseDepthMap map;
  std::size_t dropped = 0;
};

// global -> body -> camera -> rasterize -> preserve -> complete.
// Bitwise identical to running the stages by hand.
LidarPipelineResult lidar_pipeline(std::span<const Point3> points_global,
                                   const Pose& body_pose, const Pose& camera_pose,
                                   const CameraIntrinsics& intr,
                                   const CompletionParams& params,
                                   const LidarPipelineOptions& opts = {});

}  // namespace depthkit
