#include "depthkit/metrics.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include <nlohmann/json.hpp>

namespace depthkit {

const std::vector<double>& ErrorReport::bucket_edges() {
  static const std::vector<double> edges = {0.1, 0.25, 0.5, 1.0, 2.0,
                                            5.0, 10.0, 20.0, 50.0};
  return edges;
}

std::string ErrorReport::to_text() const {
  const auto& edges = bucket_edges();
  std::ostringstream os;
  os.precision(15);
  os << "avg meter error per pixel: " << mean_abs_error << "\n";
  os << "pixels compared: " << pixel_count << "\n";
  os << "histogram (|error| meters):\n";
  double lo = 0.0;
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    os << "  [" << lo << ", ";
    if (i < edges.size()) {
      os << edges[i];
      lo = edges[i];
    } else {
      os << "inf";
    }
    os << "): " << histogram[i] << "\n";
  }
  return os.str();
}

std::string ErrorReport::to_json() const {
  const auto& edges = bucket_edges();
  nlohmann::json j;
  j["mean_abs_error"] = mean_abs_error;
  j["pixel_count"] = pixel_count;
  nlohmann::json hist = nlohmann::json::array();
  double lo = 0.0;
  for (std::size_t i = 0; i < histogram.size(); ++i) {
    nlohmann::json bucket;
    bucket["lo"] = lo;
    if (i < edges.size()) {
      bucket["hi"] = edges[i];
      lo = edges[i];
    } else {
      bucket["hi"] = nullptr;
    }
    bucket["count"] = histogram[i];
    hist.push_back(bucket);
  }
  j["histogram"] = hist;
  return j.dump(2);
}

ErrorReport mean_abs_error(const DenseDepthMap& pred, const DepthMap& gt) {
  if (pred.height != gt.height || pred.width != gt.width) {
    throw std::invalid_argument("mean_abs_error: dimension mismatch");
  }
  const auto& edges = ErrorReport::bucket_edges();
  ErrorReport report;
  report.histogram.assign(edges.size() + 1, 0);
  double sum = 0.0;
  // Fixed row-major summation order keeps the result deterministic.
  for (int y = 0; y < pred.height; ++y) {
    for (int x = 0; x < pred.width; ++x) {
      if (!pred.valid(y, x) || !gt.valid(y, x)) continue;
      const double err = std::fabs(pred.at(y, x) - gt.at(y, x));
      sum += err;
      ++report.pixel_count;
      std::size_t bucket = edges.size();
      for (std::size_t i = 0; i < edges.size(); ++i) {
        if (err < edges[i]) {
          bucket = i;
          break;
        }
      }
      ++report.histogram[bucket];
    }
  }
  if (report.pixel_count == 0) {
    throw std::invalid_argument("mean_abs_error: no overlapping valid pixels");
  }
  report.mean_abs_error = sum / static_cast<double>(report.pixel_count);
  return report;
}

namespace {

// Polynomial fit of the turbo colormap, evaluated once into a fixed LUT.
std::array<std::uint8_t, 3> turbo_poly(double t) {
  auto poly = [](double x, double c0, double c1, double c2, double c3, double c4,
                 double c5) {
    return c0 + x * (c1 + x * (c2 + x * (c3 + x * (c4 + x * c5))));
  };
  const double r = poly(t, 0.13572138, 4.61539260, -42.66032258, 132.13108234,
                        -152.94239396, 59.28637943);
  const double g = poly(t, 0.09140261, 2.19418839, 4.84296658, -14.18503333,
                        4.27729857, 2.82956604);
  const double b = poly(t, 0.10667330, 12.64194608, -60.58204836, 110.36276771,
                        -89.90310912, 27.34824973);
  auto to8 = [](double v) {
    v = std::clamp(v, 0.0, 1.0);
    return static_cast<std::uint8_t>(std::lround(v * 255.0));
  };
  return {to8(r), to8(g), to8(b)};
}

}  // namespace

const std::array<std::array<std::uint8_t, 3>, 256>& turbo_lut() {
  static const auto lut = [] {
    std::array<std::array<std::uint8_t, 3>, 256> table{};
    for (int i = 0; i < 256; ++i) table[i] = turbo_poly(i / 255.0);
    return table;
  }();
  return lut;
}

RgbImage colorize_depth(const DepthMap& map, double d_min, double d_max) {
  if (!(d_min < d_max)) {
    throw std::invalid_argument("colorize_depth: need d_min < d_max");
  }
  const auto& lut = turbo_lut();
  RgbImage out(map.height, map.width);  // invalid pixels stay black
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (!map.valid(y, x)) continue;
      const double t = std::clamp((map.at(y, x) - d_min) / (d_max - d_min), 0.0, 1.0);
      const auto& c = lut[static_cast<std::size_t>(std::lround(t * 255.0))];
      out.set(y, x, c[0], c[1], c[2]);
    }
  }
  return out;
}

RgbImage overlay_points(const RgbImage& base, const SparseDepthMap& map,
                        const std::array<std::uint8_t, 3>& color) {
  if (base.height != map.height || base.width != map.width) {
    throw std::invalid_argument("overlay_points: dimension mismatch");
  }
  RgbImage out = base;
  for (int y = 0; y < map.height; ++y) {
    for (int x = 0; x < map.width; ++x) {
      if (map.valid(y, x)) out.set(y, x, color[0], color[1], color[2]);
    }
  }
  return out;
}

}  // namespace depthkit
