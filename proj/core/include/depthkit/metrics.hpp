#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <vector>

#include "depthkit/image.hpp"

namespace depthkit {

struct ErrorReport {
  double mean_abs_error = 0.0;  // meters
  std::size_t pixel_count = 0;  // pixels valid in both maps
  // Counts per absolute-error bucket; edges from bucket_edges(), last
  // bucket is the overflow.
  std::vector<std::size_t> histogram;

  static const std::vector<double>& bucket_edges();

  std::string to_text() const;
  std::string to_json() const;
};

// Average |pred - gt| over pixels valid in both maps, summed in fixed
// row-major order. Throws on dimension mismatch or empty overlap.
ErrorReport mean_abs_error(const DenseDepthMap& pred, const DepthMap& gt);

// 256-entry turbo-style colormap (polynomial fit, fixed data).
const std::array<std::array<std::uint8_t, 3>, 256>& turbo_lut();

// Valid pixels mapped through the LUT ([d_min, d_max] -> entries 0..255,
// nearest entry), invalid pixels black.
RgbImage colorize_depth(const DepthMap& map, double d_min, double d_max);

// Paints the valid pixels of `map` in `color` over `base`.
RgbImage overlay_points(const RgbImage& base, const SparseDepthMap& map,
                        const std::array<std::uint8_t, 3>& color);

}  // namespace depthkit
