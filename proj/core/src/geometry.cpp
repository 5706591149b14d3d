#include "depthkit/geometry.hpp"

#include <cmath>
#include <stdexcept>

namespace depthkit {

Quaternion::Quaternion(double w_, double x_, double y_, double z_)
    : w(w_), x(x_), y(y_), z(z_) {
  if (!std::isfinite(w) || !std::isfinite(x) || !std::isfinite(y) ||
      !std::isfinite(z)) {
    throw std::invalid_argument("quaternion components must be finite");
  }
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (n < 1e-12) {
    throw std::invalid_argument("zero quaternion cannot be normalized");
  }
  w /= n;
  x /= n;
  y /= n;
  z /= n;
}

double Quaternion::norm() const {
  return std::sqrt(w * w + x * x + y * y + z * z);
}

RotationMatrix quaternion_to_rotation(const Quaternion& q) {
  const double w = q.w, x = q.x, y = q.y, z = q.z;
  RotationMatrix r;
  r(0, 0) = 1 - 2 * y * y - 2 * z * z;
  r(0, 1) = 2 * x * y - 2 * z * w;
  r(0, 2) = 2 * x * z + 2 * y * w;
  r(1, 0) = 2 * x * y + 2 * z * w;
  r(1, 1) = 1 - 2 * x * x - 2 * z * z;
  r(1, 2) = 2 * y * z - 2 * x * w;
  r(2, 0) = 2 * x * z - 2 * y * w;
  r(2, 1) = 2 * y * z + 2 * x * w;
  r(2, 2) = 1 - 2 * x * x - 2 * y * y;
  return r;
}

Point3 parent_to_child(const Pose& pose, const Point3& p_parent) {
  const RotationMatrix r = quaternion_to_rotation(pose.rotation);
  return r.transpose() * (p_parent - pose.translation);
}

Point3 child_to_parent(const Pose& pose, const Point3& p_child) {
  const RotationMatrix r = quaternion_to_rotation(pose.rotation);
  return r * p_child + pose.translation;
}

CameraIntrinsics CameraIntrinsics::centered(double focal, int height, int width,
                                            double baseline) {
  CameraIntrinsics intr;
  intr.focal = focal;
  intr.height = height;
  intr.width = width;
  intr.cx = (width - 1) / 2.0;
  intr.cy = (height - 1) / 2.0;
  intr.baseline = baseline;
  intr.validate();
  return intr;
}

void CameraIntrinsics::validate() const {
  if (!(focal > 0) || !std::isfinite(focal)) {
    throw std::invalid_argument("intrinsics: focal must be positive");
  }
  if (!(baseline > 0) || !std::isfinite(baseline)) {
    throw std::invalid_argument("intrinsics: baseline must be positive");
  }
  if (height <= 0 || width <= 0) {
    throw std::invalid_argument("intrinsics: image size must be positive");
  }
  if (!std::isfinite(cx) || !std::isfinite(cy)) {
    throw std::invalid_argument("intrinsics: principal point must be finite");
  }
}

std::optional<PixelProjection> project_point(const CameraIntrinsics& intr,
                                             const Point3& p_cam) {
  if (!p_cam.allFinite()) {
    throw std::invalid_argument("project_point: non-finite point");
  }
  const double z = p_cam.z();
  if (z <= kMinProjectionDepth) return std::nullopt;
  PixelProjection proj;
  proj.u = intr.focal * p_cam.x() / z + intr.cx;
  proj.v = intr.focal * p_cam.y() / z + intr.cy;
  proj.depth = z;
  return proj;
}

}  // namespace depthkit
