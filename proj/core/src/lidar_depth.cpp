#include "depthkit/lidar_depth.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "depthkit/parallel.hpp"

namespace depthkit {

void CompletionParams::validate() const {
  if (ngrid < 1) throw std::invalid_argument("ngrid must be >= 1");
  if (spread_radius < 0) throw std::invalid_argument("spread_radius must be >= 0");
  if (spread_asymmetric && spread_radius < 1) {
    throw std::invalid_argument("asymmetric spread needs spread_radius >= 1");
  }
  if (!(near_threshold > 0)) {
    throw std::invalid_argument("near_threshold must be positive");
  }
}

RasterizeResult rasterize(std::span<const Point3> points_cam,
                          const CameraIntrinsics& intr) {
  intr.validate();
  RasterizeResult res;
  res.map = SparseDepthMap(intr.height, intr.width);
  for (const Point3& p : points_cam) {
    auto proj = project_point(intr, p);
    if (!proj) {
      ++res.dropped;
      continue;
    }
    // MATLAB-style round(): half away from zero.
    const long u = std::lround(proj->u);
    const long v = std::lround(proj->v);
    if (u < 0 || u >= intr.width || v < 0 || v >= intr.height) {
      ++res.dropped;
      continue;
    }
    const int y = static_cast<int>(v), x = static_cast<int>(u);
    if (!res.map.valid(y, x) || proj->depth < res.map.at(y, x)) {
      res.map.set(y, x, proj->depth);  // low depth covers high depth
    }
  }
  return res;
}

SparseDepthMap preserve_characteristics(const SparseDepthMap& map,
                                        const CompletionParams& params) {
  params.validate();
  const int lo = params.spread_asymmetric ? -(params.spread_radius - 1)
                                          : -params.spread_radius;
  const int hi = params.spread_radius;
  SparseDepthMap out(map.height, map.width);
  parallel_for(static_cast<std::size_t>(map.height), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < map.width; ++x) {
      const bool self_valid = map.valid(y, x);
      const double self = self_valid ? map.at(y, x)
                                     : std::numeric_limits<double>::infinity();
      if (self_valid && self < params.near_threshold) {
        out.set(y, x, self);  // near pixels keep their own value
        continue;
      }
      // Gather: sources q spread over q + [lo, hi]^2, so candidates for
      // this pixel live at p - [lo, hi]^2.
      double best = self;
      for (int oy = lo; oy <= hi; ++oy) {
        const int qy = y - oy;
        if (qy < 0 || qy >= map.height) continue;
        for (int ox = lo; ox <= hi; ++ox) {
          const int qx = x - ox;
          if (qx < 0 || qx >= map.width) continue;
          if (!map.valid(qy, qx)) continue;
          const double d = map.at(qy, qx);
          if (d < params.near_threshold && d < best) best = d;
        }
      }
      if (std::isfinite(best)) out.set(y, x, best);
    }
  });
  return out;
}

DenseDepthMap complete(const SparseDepthMap& map, const CompletionParams& params) {
  params.validate();
  const int r = params.ngrid;
  DenseDepthMap out(map.height, map.width);
  parallel_for(static_cast<std::size_t>(map.height), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < map.width; ++x) {
      if (map.valid(y, x)) {
        out.set(y, x, map.at(y, x));  // measurements are never altered
        continue;
      }
      double num = 0.0, den = 0.0;
      for (int oy = -r; oy <= r; ++oy) {
        const int qy = y + oy;
        if (qy < 0 || qy >= map.height) continue;
        for (int ox = -r; ox <= r; ++ox) {
          const int qx = x + ox;
          if (qx < 0 || qx >= map.width) continue;
          if (!map.valid(qy, qx)) continue;
          const double w =
              1.0 / std::sqrt(static_cast<double>(oy) * oy + static_cast<double>(ox) * ox);
          num += w * map.at(qy, qx);
          den += w;
        }
      }
      if (den > 0.0) out.set(y, x, num / den);
    }
  });
  return out;
}

LidarPipelineResult lidar_pipeline(std::span<const Point3> points_global,
                                   const Pose& body_pose, const Pose& camera_pose,
                                   const CameraIntrinsics& intr,
                                   const CompletionParams& params,
                                   const LidarPipelineOptions& opts) {
  params.validate();
  std::vector<Point3> cam_points;
  cam_points.reserve(points_global.size());
  for (const Point3& g : points_global) {
    const Point3 body = parent_to_child(body_pose, g);
    cam_points.push_back(parent_to_child(camera_pose, body));
  }
  RasterizeResult raster = rasterize(cam_points, intr);
  LidarPipelineResult res;
  res.dropped = raster.dropped;
  res.map = std::move(raster.map);
  if (opts.preserve) res.map = preserve_characteristics(res.map, params);
  if (opts.completion) res.map = complete(res.map, params);
  return res;
}

}  // namespace depthkit
