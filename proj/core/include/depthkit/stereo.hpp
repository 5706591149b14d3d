#pragma once

#include <span>
#include <vector>

#include "depthkit/geometry.hpp"
#include "depthkit/image.hpp"

namespace depthkit {

struct MatchParams {
  int min_disparity = 0;
  int num_disparities = 64;  // CLI enforces multiple of 16
  int block_size = 9;        // odd, >= 3
  // Penalties are in SAD units of [0,1] intensities summed over the block.
  float p1 = 2.0f;
  float p2 = 8.0f;
  // 0 disables the uniqueness test. A pixel is rejected when the
  // second-best cost (excluding d +/- 1) is below best*(1+ratio/100).
  int uniqueness_ratio = 0;
  int directions = 8;  // 1, 4 or 8 aggregation directions
  bool subpixel = true;
  // Invalidate pixels whose full disparity search range runs off the left
  // image edge (the no-matching-columns band; padding removes it).
  bool require_full_range = true;

  int max_disparity() const { return min_disparity + num_disparities - 1; }
  void validate() const;  // strict CLI-facing checks
};

// H x W x D matching costs, disparity index fastest.
struct CostVolume {
  int height = 0, width = 0, num_disp = 0;
  std::vector<float> data;

  CostVolume() = default;
  CostVolume(int h, int w, int d)
      : height(h), width(w), num_disp(d),
        data(static_cast<std::size_t>(h) * w * d, 0.f) {}

  std::size_t index(int y, int x, int d) const {
    return (static_cast<std::size_t>(y) * width + x) * num_disp + d;
  }
  float& at(int y, int x, int d) { return data[index(y, x, d)]; }
  float at(int y, int x, int d) const { return data[index(y, x, d)]; }
};

// Separable Gaussian smoothing, kernel radius ceil(3*sigma),
// clamp-to-border. sigma = 0 is the identity.
GrayImage gaussian_blur(const GrayImage& img, double sigma);

// C(p,d) = sum over the block of |left(p+o) - right(p-(d,0)+o)| with every
// sample clamped to the image border.
CostVolume sad_cost_volume(const GrayImage& left, const GrayImage& right,
                           const MatchParams& params);

// Winner-take-all with lowest-disparity tie-break, optional uniqueness
// rejection and parabola sub-pixel refinement (1/16 px fixed point).
DisparityMap bm_match(const CostVolume& cost, const MatchParams& params);

// Semi-global aggregation: per-direction scanline recursion
//   L_r(p,d) = C(p,d) + min(L_r(p-r,d), L_r(p-r,d+/-1)+P1,
//                           min_k L_r(p-r,k)+P2) - min_k L_r(p-r,k)
// summed over the configured directions.
CostVolume sgm_aggregate(const CostVolume& cost, const MatchParams& params);

// Exact minimizer of the scanline disparity energy
//   sum_i cost(i, d_i) + sum_i pen(|d_i - d_{i+1}|),
// pen(0)=0, pen(1)=P1, pen(>1)=P2, by DP with backtracking. Lowest
// disparity wins ties. cost_row is width x num_disp, d fastest.
std::vector<int> scanline_dp(std::span<const float> cost_row, int width,
                             int num_disp, float p1, float p2);

// Energy of a full labeling: data costs plus P1/P2 penalties over
// 4-neighbor pixel pairs, each unordered pair counted once.
double evaluate_energy(const CostVolume& cost, const std::vector<int>& labels,
                       float p1, float p2);

struct PaddedPair {
  GrayImage left, right;
  int crop_offset = 0;  // columns to drop from the matched disparity map
};

// Prepends num_disparities edge-replicated columns to both images so the
// leftmost real columns have a full search range.
PaddedPair pad_for_matching(const GrayImage& left, const GrayImage& right,
                            const MatchParams& params);

DisparityMap crop_disparity(const DisparityMap& disp, int crop_offset);

// Right-view disparity by matching with swapped roles (mirror both
// images, match, mirror back).
DisparityMap match_right(const GrayImage& left, const GrayImage& right,
                         const MatchParams& params, bool use_sgm = true);

// Disparities below this are treated as no-depth rather than producing
// huge values.
inline constexpr double kMinDepthDisparity = 1.0 / DisparityMap::kScale;

// Z = focal * baseline / d.
DenseDepthMap disparity_to_depth(const DisparityMap& disp,
                                 const CameraIntrinsics& intr);

}  // namespace depthkit
