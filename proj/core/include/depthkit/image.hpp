#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <vector>

namespace depthkit {

// Single-channel intensity image, values in [0, 1].
struct GrayImage {
  int height = 0, width = 0;
  std::vector<float> data;  // row-major

  GrayImage() = default;
  GrayImage(int h, int w, float fill = 0.f)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, fill) {}

  float& at(int y, int x) { return data[static_cast<std::size_t>(y) * width + x]; }
  float at(int y, int x) const { return data[static_cast<std::size_t>(y) * width + x]; }
  float at_clamped(int y, int x) const {
    y = std::clamp(y, 0, height - 1);
    x = std::clamp(x, 0, width - 1);
    return at(y, x);
  }
  bool same_size(const GrayImage& o) const {
    return height == o.height && width == o.width;
  }
};

// Per-pixel metric depth with an explicit no-data state (stored as NaN,
// observable only through valid()).
struct DepthMap {
  int height = 0, width = 0;
  std::vector<double> data;  // row-major; NaN = no measurement

  DepthMap() = default;
  DepthMap(int h, int w)
      : height(h), width(w),
        data(static_cast<std::size_t>(h) * w,
             std::numeric_limits<double>::quiet_NaN()) {}

  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  bool valid(int y, int x) const { return !std::isnan(data[index(y, x)]); }
  double at(int y, int x) const { return data[index(y, x)]; }
  void set(int y, int x, double d) { data[index(y, x)] = d; }
  void clear(int y, int x) {
    data[index(y, x)] = std::numeric_limits<double>::quiet_NaN();
  }
  std::size_t valid_count() const;
};

// Sparse vs dense is a contract about holes, not a different layout.
using SparseDepthMap = DepthMap;
using DenseDepthMap = DepthMap;

// Bitwise comparison (NaN-safe), used by the determinism checks.
bool bitwise_equal(const DepthMap& a, const DepthMap& b);

// Disparity in pixels, fixed point with 1/16 sub-pixel scale, int16 storage.
struct DisparityMap {
  static constexpr int kScale = 16;
  static constexpr std::int16_t kInvalid = std::numeric_limits<std::int16_t>::min();

  int height = 0, width = 0;
  std::vector<std::int16_t> data;  // row-major, raw fixed-point

  DisparityMap() = default;
  DisparityMap(int h, int w)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w, kInvalid) {}

  std::size_t index(int y, int x) const {
    return static_cast<std::size_t>(y) * width + x;
  }
  bool valid(int y, int x) const { return data[index(y, x)] != kInvalid; }
  std::int16_t raw(int y, int x) const { return data[index(y, x)]; }
  void set_raw(int y, int x, std::int16_t r) { data[index(y, x)] = r; }
  // Disparity in pixels; only meaningful on valid pixels.
  float value(int y, int x) const {
    return static_cast<float>(data[index(y, x)]) / kScale;
  }
};

// Interleaved 8-bit RGB.
struct RgbImage {
  int height = 0, width = 0;
  std::vector<std::uint8_t> data;  // row-major, 3 bytes per pixel

  RgbImage() = default;
  RgbImage(int h, int w)
      : height(h), width(w), data(static_cast<std::size_t>(h) * w * 3, 0) {}

  std::size_t index(int y, int x) const {
    return (static_cast<std::size_t>(y) * width + x) * 3;
  }
  void set(int y, int x, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    std::size_t i = index(y, x);
    data[i] = r;
    data[i + 1] = g;
    data[i + 2] = b;
  }
};

}  // namespace depthkit
