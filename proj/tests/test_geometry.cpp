#include <doctest.h>

#include <Eigen/LU>

#include <cmath>
#include <random>

#include "depthkit/geometry.hpp"

using namespace depthkit;

namespace {

Quaternion random_quaternion(std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Quaternion(g(rng), g(rng), g(rng), g(rng));
}

Pose random_pose(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> t(-10.0, 10.0);
  return Pose{random_quaternion(rng), Point3(t(rng), t(rng), t(rng))};
}

Point3 random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> c(-50.0, 50.0);
  return Point3(c(rng), c(rng), c(rng));
}

}  // namespace

TEST_CASE("quaternion constructor normalizes and rejects degenerate input") {
  Quaternion q(2.0, 0.0, 0.0, 0.0);
  CHECK(q.w == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(std::abs(q.norm() - 1.0) < 1e-9);
  CHECK_THROWS_AS(Quaternion(0.0, 0.0, 0.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(Quaternion(std::nan(""), 0.0, 0.0, 1.0), std::invalid_argument);

  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) {
    CHECK(std::abs(random_quaternion(rng).norm() - 1.0) < 1e-9);
  }
}

TEST_CASE("quaternion_to_rotation matches the closed-form matrix") {
  SUBCASE("identity quaternion") {
    const RotationMatrix r = quaternion_to_rotation(Quaternion(1, 0, 0, 0));
    CHECK((r - RotationMatrix::Identity()).norm() == doctest::Approx(0.0));
  }
  SUBCASE("half turn about x") {
    const RotationMatrix r = quaternion_to_rotation(Quaternion(0, 1, 0, 0));
    RotationMatrix expect = RotationMatrix::Zero();
    expect(0, 0) = 1;
    expect(1, 1) = -1;
    expect(2, 2) = -1;
    CHECK((r - expect).norm() == doctest::Approx(0.0));
  }
  SUBCASE("quarter turn about z, entries evaluated by hand") {
    const double s = std::sqrt(2.0) / 2.0;
    const RotationMatrix r = quaternion_to_rotation(Quaternion(s, 0, 0, s));
    RotationMatrix expect;
    expect << 0, -1, 0, 1, 0, 0, 0, 0, 1;
    CHECK((r - expect).norm() < 1e-12);
  }
}

TEST_CASE("rotation matrices are orthonormal with unit determinant") {
  std::mt19937_64 rng(2);
  for (int i = 0; i < 200; ++i) {
    const RotationMatrix r = quaternion_to_rotation(random_quaternion(rng));
    CHECK((r.transpose() * r - RotationMatrix::Identity()).norm() < 1e-9);
    CHECK(std::abs(r.determinant() - 1.0) < 1e-9);
  }
}

TEST_CASE("q and -q encode the same rotation exactly") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    // Negate the raw components before the normalizing constructor so both
    // quaternions go through exactly one normalization.
    const double w = gauss(rng), x = gauss(rng), y = gauss(rng), z = gauss(rng);
    const RotationMatrix a = quaternion_to_rotation(Quaternion(w, x, y, z));
    const RotationMatrix b = quaternion_to_rotation(Quaternion(-w, -x, -y, -z));
    // The formula is quadratic in the components, so the sign cancels
    // bitwise, not just approximately.
    CHECK((a.array() == b.array()).all());
  }
}

TEST_CASE("parent_to_child examples") {
  SUBCASE("identity pose is the identity map") {
    const Point3 p = parent_to_child(Pose{}, Point3(3, 4, 5));
    CHECK((p - Point3(3, 4, 5)).norm() == doctest::Approx(0.0));
  }
  SUBCASE("pure translation") {
    Pose pose;
    pose.translation = Point3(1, 2, 3);
    const Point3 p = parent_to_child(pose, Point3(1, 2, 3));
    CHECK(p.norm() == doctest::Approx(0.0));
  }
  SUBCASE("90 degrees about z applies the transposed rotation") {
    const double s = std::sqrt(2.0) / 2.0;
    Pose pose{Quaternion(s, 0, 0, s), Point3::Zero()};
    const Point3 p = parent_to_child(pose, Point3(1, 0, 0));
    CHECK((p - Point3(0, -1, 0)).norm() < 1e-12);
  }
}

TEST_CASE("parent/child round trip on random poses") {
  std::mt19937_64 rng(4);
  for (int i = 0; i < 500; ++i) {
    const Pose pose = random_pose(rng);
    const Point3 p = random_point(rng);
    const Point3 back = parent_to_child(pose, child_to_parent(pose, p));
    CHECK((back - p).norm() < 1e-9);
  }
}

TEST_CASE("chained transform equals composed single transform") {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const Pose body = random_pose(rng);
    const Pose cam = random_pose(rng);
    const Point3 p = random_point(rng);

    const Point3 chained = parent_to_child(cam, parent_to_child(body, p));

    // Composed global-from-camera pose: R = Rb * Rc, t = Rb * tc + tb.
    const RotationMatrix rb = quaternion_to_rotation(body.rotation);
    const RotationMatrix rc = quaternion_to_rotation(cam.rotation);
    const RotationMatrix r = rb * rc;
    const Point3 t = rb * cam.translation + body.translation;
    const Point3 composed = r.transpose() * (p - t);

    CHECK((chained - composed).norm() < 1e-9);
  }
}

TEST_CASE("project_point pinhole examples") {
  CameraIntrinsics intr;
  intr.focal = 945.391406;
  intr.cx = 828;
  intr.cy = 430;
  intr.height = 860;
  intr.width = 1656;
  intr.baseline = 0.5764;
  intr.validate();

  SUBCASE("optical axis") {
    const auto p = project_point(intr, Point3(0, 0, 10));
    REQUIRE(p.has_value());
    CHECK(p->u == doctest::Approx(828.0));
    CHECK(p->v == doctest::Approx(430.0));
    CHECK(p->depth == doctest::Approx(10.0));
  }
  SUBCASE("unit lateral offset at 10 m") {
    const auto p = project_point(intr, Point3(1, 0, 10));
    REQUIRE(p.has_value());
    CHECK(p->u == doctest::Approx(828.0 + 94.5391406).epsilon(1e-12));
    CHECK(p->v == doctest::Approx(430.0));
    CHECK(p->depth == doctest::Approx(10.0));
  }
  SUBCASE("behind camera is a signaled outcome") {
    CHECK_FALSE(project_point(intr, Point3(0, 0, -1)).has_value());
    CHECK_FALSE(project_point(intr, Point3(0, 0, 0)).has_value());
  }
  SUBCASE("non-finite input is an error") {
    CHECK_THROWS_AS(project_point(intr, Point3(std::nan(""), 0, 1)),
                    std::invalid_argument);
  }
}

TEST_CASE("projection is scale consistent along the ray") {
  CameraIntrinsics intr = CameraIntrinsics::centered(500.0, 480, 640, 0.5);
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> c(-5.0, 5.0);
  std::uniform_real_distribution<double> zd(0.5, 60.0);
  std::uniform_real_distribution<double> sc(0.1, 10.0);
  for (int i = 0; i < 200; ++i) {
    const Point3 p(c(rng), c(rng), zd(rng));
    const double lambda = sc(rng);
    const auto a = project_point(intr, p);
    const auto b = project_point(intr, Point3(lambda * p));
    REQUIRE(a.has_value());
    REQUIRE(b.has_value());
    CHECK(std::abs(a->u - b->u) < 1e-9);
    CHECK(std::abs(a->v - b->v) < 1e-9);
    CHECK(b->depth == doctest::Approx(lambda * p.z()).epsilon(1e-12));
  }
}

TEST_CASE("intrinsics validation and centered principal point") {
  const CameraIntrinsics intr = CameraIntrinsics::centered(100.0, 480, 640, 0.5);
  CHECK(intr.cx == doctest::Approx((640 - 1) / 2.0));
  CHECK(intr.cy == doctest::Approx((480 - 1) / 2.0));
  CameraIntrinsics bad = intr;
  bad.focal = -1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = intr;
  bad.baseline = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = intr;
  bad.width = 0;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}
