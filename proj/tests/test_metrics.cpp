#include <doctest.h>

#include <nlohmann/json.hpp>

#include "depthkit/metrics.hpp"

using namespace depthkit;

TEST_CASE("mean_abs_error hand examples") {
  DenseDepthMap pred(2, 2);
  DepthMap gt(2, 2);
  pred.set(0, 0, 10.0);
  gt.set(0, 0, 12.5);
  pred.set(0, 1, 4.0);
  gt.set(0, 1, 3.0);
  pred.set(1, 0, 7.0);  // gt missing here: excluded from the overlap
  gt.set(1, 1, 9.0);    // pred missing here: excluded too

  const ErrorReport r = mean_abs_error(pred, gt);
  CHECK(r.pixel_count == 2);
  CHECK(r.mean_abs_error == doctest::Approx((2.5 + 1.0) / 2).epsilon(1e-12));

  SUBCASE("error is symmetric in the arguments") {
    const ErrorReport s = mean_abs_error(gt, pred);
    CHECK(s.mean_abs_error == r.mean_abs_error);
    CHECK(s.pixel_count == r.pixel_count);
  }
  SUBCASE("identical maps give zero error") {
    const ErrorReport z = mean_abs_error(pred, pred);
    CHECK(z.mean_abs_error == 0.0);
    CHECK(z.pixel_count == 3);
  }
}

TEST_CASE("mean_abs_error scales linearly with the depth gap") {
  DenseDepthMap pred(1, 3);
  DepthMap gt(1, 3);
  for (int x = 0; x < 3; ++x) {
    pred.set(0, x, 10.0 + 4.0 * x);
    gt.set(0, x, 10.0);
  }
  CHECK(mean_abs_error(pred, gt).mean_abs_error ==
        doctest::Approx(4.0).epsilon(1e-12));
  for (int x = 0; x < 3; ++x) pred.set(0, x, 10.0 + 8.0 * x);
  CHECK(mean_abs_error(pred, gt).mean_abs_error ==
        doctest::Approx(8.0).epsilon(1e-12));
}

TEST_CASE("mean_abs_error error cases") {
  CHECK_THROWS_AS(mean_abs_error(DenseDepthMap(2, 2), DepthMap(2, 3)),
                  std::invalid_argument);
  DenseDepthMap pred(2, 2);
  DepthMap gt(2, 2);
  pred.set(0, 0, 1.0);
  gt.set(1, 1, 1.0);  // no pixel valid in both
  CHECK_THROWS(mean_abs_error(pred, gt));
}

TEST_CASE("error histogram buckets") {
  const auto& edges = ErrorReport::bucket_edges();
  REQUIRE(edges.size() == 9);
  CHECK(edges.front() == 0.1);
  CHECK(edges.back() == 50.0);

  DenseDepthMap pred(1, 4);
  DepthMap gt(1, 4);
  const double errs[4] = {0.05, 0.3, 3.0, 100.0};
  for (int x = 0; x < 4; ++x) {
    gt.set(0, x, 10.0);
    pred.set(0, x, 10.0 + errs[x]);
  }
  const ErrorReport r = mean_abs_error(pred, gt);
  REQUIRE(r.histogram.size() == edges.size() + 1);
  CHECK(r.histogram[0] == 1);  // <= 0.1
  CHECK(r.histogram[2] == 1);  // (0.25, 0.5]
  CHECK(r.histogram[5] == 1);  // (2, 5]
  CHECK(r.histogram.back() == 1);  // overflow
  std::size_t total = 0;
  for (std::size_t c : r.histogram) total += c;
  CHECK(total == r.pixel_count);
}

TEST_CASE("report serialization") {
  DenseDepthMap pred(1, 2);
  DepthMap gt(1, 2);
  pred.set(0, 0, 10.0);
  gt.set(0, 0, 11.0);
  pred.set(0, 1, 5.0);
  gt.set(0, 1, 5.0);
  const ErrorReport r = mean_abs_error(pred, gt);

  SUBCASE("text carries the headline number") {
    const std::string text = r.to_text();
    CHECK(text.find("avg meter error per pixel") != std::string::npos);
    CHECK(text.find("0.5") != std::string::npos);
  }
  SUBCASE("json round-trips through a parser") {
    const nlohmann::json j = nlohmann::json::parse(r.to_json());
    CHECK(j.at("mean_abs_error").get<double>() == doctest::Approx(0.5));
    CHECK(j.at("pixel_count").get<std::size_t>() == 2);
    CHECK(j.at("histogram").size() == r.histogram.size());
  }
}

TEST_CASE("turbo colormap endpoints and colorization") {
  const auto& lut = turbo_lut();
  // Blue-dominant in the first quarter, red-dominant at the high end.
  CHECK(lut[64][2] > lut[64][0]);
  CHECK(lut[255][0] > lut[255][2]);

  DepthMap m(1, 4);
  m.set(0, 0, 0.0);
  m.set(0, 1, 10.0);
  m.set(0, 2, 5.0);
  // (0, 3) left invalid.
  const RgbImage img = colorize_depth(m, 0.0, 10.0);
  auto pixel = [&](int x) {
    const std::size_t i = img.index(0, x);
    return std::array<std::uint8_t, 3>{img.data[i], img.data[i + 1],
                                       img.data[i + 2]};
  };
  CHECK(pixel(0) == lut[0]);
  CHECK(pixel(1) == lut[255]);
  CHECK(pixel(2) == lut[128]);  // lround(0.5 * 255) = 128
  CHECK(pixel(3) == std::array<std::uint8_t, 3>{0, 0, 0});
}

TEST_CASE("overlay paints only the valid sparse pixels") {
  RgbImage base(2, 2);
  base.set(0, 0, 9, 9, 9);
  base.set(1, 1, 7, 7, 7);
  SparseDepthMap pts(2, 2);
  pts.set(0, 1, 3.0);
  const RgbImage out = overlay_points(base, pts, {255, 0, 0});
  CHECK(out.data[out.index(0, 1)] == 255);
  CHECK(out.data[out.index(0, 1) + 1] == 0);
  CHECK(out.data[out.index(0, 0)] == 9);
  CHECK(out.data[out.index(1, 1)] == 7);
}
