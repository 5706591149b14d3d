#pragma once

#include <Eigen/Core>
#include <optional>

namespace depthkit {

using Point3 = Eigen::Vector3d;
// Row/column indexing follows the usual row-major reading: R(r, c).
using RotationMatrix = Eigen::Matrix3d;

// Unit quaternion (w, x, y, z). The constructor normalizes; a zero or
// non-finite quaternion is rejected.
struct Quaternion {
  double w = 1.0, x = 0.0, y = 0.0, z = 0.0;

  Quaternion() = default;
  Quaternion(double w, double x, double y, double z);

  static Quaternion identity() { return {}; }
  Quaternion negated() const { return Quaternion{-w, -x, -y, -z}; }
  double norm() const;
};

RotationMatrix quaternion_to_rotation(const Quaternion& q);

// Rigid transform placing a child frame in a parent frame:
// rotation is parent-from-child, translation is the child origin
// expressed in the parent frame.
struct Pose {
  Quaternion rotation;
  Point3 translation = Point3::Zero();
};

// p expressed in the child frame: R^T (p - t).
Point3 parent_to_child(const Pose& pose, const Point3& p_parent);
// Inverse map: R p + t.
Point3 child_to_parent(const Pose& pose, const Point3& p_child);

// Pinhole camera. Camera axes: z forward, x right, y down. Swapping
// conventions only changes the pose files fed in, never this code.
struct CameraIntrinsics {
  double focal = 0.0;      // pixels
  double cx = 0.0, cy = 0.0;
  int height = 0, width = 0;
  double baseline = 0.0;   // meters

  // Principal point defaults to the image center.
  static CameraIntrinsics centered(double focal, int height, int width,
                                   double baseline);
  void validate() const;
};

struct PixelProjection {
  double u = 0.0;  // column, pixels (unrounded)
  double v = 0.0;  // row, pixels (unrounded)
  double depth = 0.0;
};

// Points closer than this to the image plane count as behind the camera.
inline constexpr double kMinProjectionDepth = 1e-6;

// Pinhole projection; nullopt signals behind-camera (z <= kMinProjectionDepth).
std::optional<PixelProjection> project_point(const CameraIntrinsics& intr,
                                             const Point3& p_cam);

}  // namespace depthkit
