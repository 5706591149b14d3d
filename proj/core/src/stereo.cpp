#include "depthkit/stereo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

#include "depthkit/parallel.hpp"

namespace depthkit {

void MatchParams::validate() const {
  if (num_disparities <= 0 || num_disparities % 16 != 0) {
    throw std::invalid_argument("num_disparities must be a positive multiple of 16");
  }
  if (block_size < 3 || block_size % 2 == 0) {
    throw std::invalid_argument("block_size must be odd and >= 3");
  }
  if (p1 < 0 || p2 < p1) {
    throw std::invalid_argument("need 0 <= P1 <= P2");
  }
  if (uniqueness_ratio < 0) {
    throw std::invalid_argument("uniqueness_ratio must be >= 0");
  }
  if (directions != 1 && directions != 4 && directions != 8) {
    throw std::invalid_argument("directions must be 1, 4 or 8");
  }
}

GrayImage gaussian_blur(const GrayImage& img, double sigma) {
  if (sigma < 0) throw std::invalid_argument("sigma must be >= 0");
  if (sigma == 0.0 || img.data.empty()) return img;

  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<float> kernel(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(static_cast<double>(i) * i) / (2.0 * sigma * sigma));
    kernel[i + radius] = static_cast<float>(w);
    sum += w;
  }
  for (float& k : kernel) k = static_cast<float>(k / sum);

  GrayImage tmp(img.height, img.width);
  parallel_for(static_cast<std::size_t>(img.height), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < img.width; ++x) {
      float acc = 0.f;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * img.at_clamped(y, x + i);
      }
      tmp.at(y, x) = acc;
    }
  });
  GrayImage out(img.height, img.width);
  parallel_for(static_cast<std::size_t>(img.height), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < img.width; ++x) {
      float acc = 0.f;
      for (int i = -radius; i <= radius; ++i) {
        acc += kernel[i + radius] * tmp.at_clamped(y + i, x);
      }
      out.at(y, x) = acc;
    }
  });
  return out;
}

CostVolume sad_cost_volume(const GrayImage& left, const GrayImage& right,
                           const MatchParams& params) {
  if (!left.same_size(right)) {
    throw std::invalid_argument("sad_cost_volume: image size mismatch");
  }
  if (params.block_size < 3 || params.block_size % 2 == 0) {
    throw std::invalid_argument("block_size must be odd and >= 3");
  }
  if (params.num_disparities < 1) {
    throw std::invalid_argument("num_disparities must be >= 1");
  }
  const int h = left.height, w = left.width;
  const int r = params.block_size / 2;
  const int d0 = params.min_disparity;
  const int nd = params.num_disparities;
  CostVolume cv(h, w, nd);

  parallel_for(static_cast<std::size_t>(h), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    const bool y_interior = (y - r >= 0) && (y + r < h);
    float* out_row = &cv.data[cv.index(y, 0, 0)];
    for (int x = 0; x < w; ++x) {
      for (int d = 0; d < nd; ++d) {
        const int shift = d0 + d;
        float acc = 0.f;
        if (y_interior && x - r >= 0 && x + r < w && x - r - shift >= 0 &&
            x + r - shift < w) {
          for (int oy = -r; oy <= r; ++oy) {
            const float* lrow = &left.data[static_cast<std::size_t>(y + oy) * w];
            const float* rrow = &right.data[static_cast<std::size_t>(y + oy) * w];
            for (int ox = -r; ox <= r; ++ox) {
              acc += std::fabs(lrow[x + ox] - rrow[x + ox - shift]);
            }
          }
        } else {
          for (int oy = -r; oy <= r; ++oy) {
            const int sy = std::clamp(y + oy, 0, h - 1);
            const float* lrow = &left.data[static_cast<std::size_t>(sy) * w];
            const float* rrow = &right.data[static_cast<std::size_t>(sy) * w];
            for (int ox = -r; ox <= r; ++ox) {
              const int lx = std::clamp(x + ox, 0, w - 1);
              const int rx = std::clamp(x + ox - shift, 0, w - 1);
              acc += std::fabs(lrow[lx] - rrow[rx]);
            }
          }
        }
        out_row[static_cast<std::size_t>(x) * nd + d] = acc;
      }
    }
  });
  return cv;
}

DisparityMap bm_match(const CostVolume& cost, const MatchParams& params) {
  const int h = cost.height, w = cost.width, nd = cost.num_disp;
  DisparityMap disp(h, w);
  parallel_for(static_cast<std::size_t>(h), [&](std::size_t yy) {
    const int y = static_cast<int>(yy);
    for (int x = 0; x < w; ++x) {
      if (params.require_full_range && x < params.min_disparity + nd) {
        continue;  // search range runs off the left edge
      }
      const float* c = &cost.data[cost.index(y, x, 0)];
      int best_d = 0;
      float best = c[0];
      for (int d = 1; d < nd; ++d) {
        if (c[d] < best) {  // ties keep the lowest disparity
          best = c[d];
          best_d = d;
        }
      }
      if (params.uniqueness_ratio > 0) {
        float second = std::numeric_limits<float>::infinity();
        for (int d = 0; d < nd; ++d) {
          if (std::abs(d - best_d) <= 1) continue;
          second = std::min(second, c[d]);
        }
        if (second < best * (1.f + params.uniqueness_ratio / 100.f)) {
          continue;  // ambiguous match
        }
      }
      float sub = 0.f;
      if (params.subpixel && best_d > 0 && best_d < nd - 1) {
        const float denom = c[best_d - 1] + c[best_d + 1] - 2.f * best;
        if (denom > 0.f) {
          sub = std::clamp((c[best_d - 1] - c[best_d + 1]) / (2.f * denom),
                           -0.5f, 0.5f);
        }
      }
      const double value = params.min_disparity + best_d + sub;
      long raw = std::lround(value * DisparityMap::kScale);
      raw = std::clamp<long>(raw,
                             static_cast<long>(params.min_disparity) * DisparityMap::kScale,
                             static_cast<long>(params.min_disparity + nd - 1) *
                                 DisparityMap::kScale);
      disp.set_raw(y, x, static_cast<std::int16_t>(raw));
    }
  });
  return disp;
}

namespace {

struct Direction {
  int dy, dx;
};

std::vector<Direction> direction_set(int directions) {
  switch (directions) {
    case 1:
      return {{0, 1}};
    case 4:
      return {{0, 1}, {0, -1}, {1, 0}, {-1, 0}};
    case 8:
      return {{0, 1}, {0, -1}, {1, 0}, {-1, 0}, {1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
    default:
      throw std::invalid_argument("directions must be 1, 4 or 8");
  }
}

// Walks one scanline path, adding the aggregated costs into `sum`.
// Paths of a single direction cover disjoint pixels, so they can run in
// parallel; directions are accumulated sequentially in a fixed order.
void aggregate_path(const CostVolume& cost, float p1, float p2, int y0, int x0,
                    int dy, int dx, CostVolume& sum) {
  const int nd = cost.num_disp;
  std::vector<float> prev(nd), cur(nd);
  int y = y0, x = x0;
  bool first = true;
  float prev_min = 0.f;
  while (y >= 0 && y < cost.height && x >= 0 && x < cost.width) {
    const float* c = &cost.data[cost.index(y, x, 0)];
    if (first) {
      for (int d = 0; d < nd; ++d) cur[d] = c[d];
      first = false;
    } else {
      for (int d = 0; d < nd; ++d) {
        float best = prev[d];
        if (d > 0) best = std::min(best, prev[d - 1] + p1);
        if (d < nd - 1) best = std::min(best, prev[d + 1] + p1);
        best = std::min(best, prev_min + p2);
        cur[d] = c[d] + best - prev_min;
      }
    }
    prev_min = cur[0];
    for (int d = 1; d < nd; ++d) prev_min = std::min(prev_min, cur[d]);
    float* out = &sum.data[sum.index(y, x, 0)];
    for (int d = 0; d < nd; ++d) out[d] += cur[d];
    std::swap(prev, cur);
    y += dy;
    x += dx;
  }
}

}  // namespace

CostVolume sgm_aggregate(const CostVolume& cost, const MatchParams& params) {
  if (params.p1 < 0 || params.p2 < params.p1) {
    throw std::invalid_argument("need 0 <= P1 <= P2");
  }
  CostVolume sum(cost.height, cost.width, cost.num_disp);
  for (const Direction& dir : direction_set(params.directions)) {
    // Path starts: pixels whose predecessor p - r is outside the image.
    std::vector<std::pair<int, int>> starts;
    for (int y = 0; y < cost.height; ++y) {
      for (int x = 0; x < cost.width; ++x) {
        const int py = y - dir.dy, px = x - dir.dx;
        if (py < 0 || py >= cost.height || px < 0 || px >= cost.width) {
          starts.emplace_back(y, x);
        }
      }
    }
    parallel_for(starts.size(), [&](std::size_t i) {
      aggregate_path(cost, params.p1, params.p2, starts[i].first,
                     starts[i].second, dir.dy, dir.dx, sum);
    });
  }
  return sum;
}

std::vector<int> scanline_dp(std::span<const float> cost_row, int width,
                             int num_disp, float p1, float p2) {
  if (width <= 0 || num_disp <= 0 ||
      cost_row.size() != static_cast<std::size_t>(width) * num_disp) {
    throw std::invalid_argument("scanline_dp: bad dimensions");
  }
  auto pen = [&](int dd) -> float {
    if (dd == 0) return 0.f;
    return dd == 1 || dd == -1 ? p1 : p2;
  };
  std::vector<float> prev(num_disp), cur(num_disp);
  std::vector<int> back(static_cast<std::size_t>(width) * num_disp, 0);
  for (int d = 0; d < num_disp; ++d) prev[d] = cost_row[d];
  for (int x = 1; x < width; ++x) {
    for (int d = 0; d < num_disp; ++d) {
      int best_k = 0;
      float best = prev[0] + pen(d);
      for (int k = 1; k < num_disp; ++k) {
        const float v = prev[k] + pen(d - k);
        if (v < best) {
          best = v;
          best_k = k;
        }
      }
      cur[d] = cost_row[static_cast<std::size_t>(x) * num_disp + d] + best;
      back[static_cast<std::size_t>(x) * num_disp + d] = best_k;
    }
    std::swap(prev, cur);
  }
  int best_d = 0;
  for (int d = 1; d < num_disp; ++d) {
    if (prev[d] < prev[best_d]) best_d = d;
  }
  std::vector<int> labels(width);
  labels[width - 1] = best_d;
  for (int x = width - 1; x > 0; --x) {
    labels[x - 1] = back[static_cast<std::size_t>(x) * num_disp + labels[x]];
  }
  return labels;
}

double evaluate_energy(const CostVolume& cost, const std::vector<int>& labels,
                       float p1, float p2) {
  if (labels.size() != static_cast<std::size_t>(cost.height) * cost.width) {
    throw std::invalid_argument("evaluate_energy: label size mismatch");
  }
  auto pen = [&](int a, int b) -> double {
    const int dd = std::abs(a - b);
    if (dd == 0) return 0.0;
    return dd == 1 ? p1 : p2;
  };
  double e = 0.0;
  for (int y = 0; y < cost.height; ++y) {
    for (int x = 0; x < cost.width; ++x) {
      const int d = labels[static_cast<std::size_t>(y) * cost.width + x];
      e += cost.at(y, x, d);
      if (x + 1 < cost.width) {
        e += pen(d, labels[static_cast<std::size_t>(y) * cost.width + x + 1]);
      }
      if (y + 1 < cost.height) {
        e += pen(d, labels[static_cast<std::size_t>(y + 1) * cost.width + x]);
      }
    }
  }
  return e;
}

PaddedPair pad_for_matching(const GrayImage& left, const GrayImage& right,
                            const MatchParams& params) {
  if (!left.same_size(right)) {
    throw std::invalid_argument("pad_for_matching: image size mismatch");
  }
  const int pad = params.num_disparities;
  auto pad_one = [&](const GrayImage& img) {
    GrayImage out(img.height, img.width + pad);
    for (int y = 0; y < img.height; ++y) {
      const float edge = img.at(y, 0);
      for (int x = 0; x < pad; ++x) out.at(y, x) = edge;
      for (int x = 0; x < img.width; ++x) out.at(y, x + pad) = img.at(y, x);
    }
    return out;
  };
  return PaddedPair{pad_one(left), pad_one(right), pad};
}

DisparityMap crop_disparity(const DisparityMap& disp, int crop_offset) {
  if (crop_offset < 0 || crop_offset > disp.width) {
    throw std::invalid_argument("crop_disparity: bad offset");
  }
  DisparityMap out(disp.height, disp.width - crop_offset);
  for (int y = 0; y < disp.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.set_raw(y, x, disp.raw(y, x + crop_offset));
    }
  }
  return out;
}

namespace {

GrayImage mirror_horizontal(const GrayImage& img) {
  GrayImage out(img.height, img.width);
  for (int y = 0; y < img.height; ++y) {
    for (int x = 0; x < img.width; ++x) {
      out.at(y, x) = img.at(y, img.width - 1 - x);
    }
  }
  return out;
}

}  // namespace

DisparityMap match_right(const GrayImage& left, const GrayImage& right,
                         const MatchParams& params, bool use_sgm) {
  // Right disparity d matches R(x) to L(x + d); mirroring both images
  // turns that into the standard left-matches-right search.
  const GrayImage ml = mirror_horizontal(right);
  const GrayImage mr = mirror_horizontal(left);
  CostVolume cv = sad_cost_volume(ml, mr, params);
  if (use_sgm) cv = sgm_aggregate(cv, params);
  DisparityMap mirrored = bm_match(cv, params);
  DisparityMap out(mirrored.height, mirrored.width);
  for (int y = 0; y < out.height; ++y) {
    for (int x = 0; x < out.width; ++x) {
      out.set_raw(y, x, mirrored.raw(y, mirrored.width - 1 - x));
    }
  }
  return out;
}

DenseDepthMap disparity_to_depth(const DisparityMap& disp,
                                 const CameraIntrinsics& intr) {
  intr.validate();
  DenseDepthMap out(disp.height, disp.width);
  const double fb = intr.focal * intr.baseline;
  for (int y = 0; y < disp.height; ++y) {
    for (int x = 0; x < disp.width; ++x) {
      if (!disp.valid(y, x)) continue;
      const double d = static_cast<double>(disp.raw(y, x)) / DisparityMap::kScale;
      if (d < kMinDepthDisparity) continue;
      out.set(y, x, fb / d);
    }
  }
  return out;
}

}  // namespace depthkit
