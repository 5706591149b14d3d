#pragma once

#include <cstdint>
#include <vector>

#include "depthkit/image.hpp"

namespace depthkit {

struct WlsParams {
  double lambda = 8000.0;  // data vs smoothness balance
  double alpha = 1.3;      // gradient-sensitivity exponent
  double eps = 1e-4;       // affinity floor on flat guide regions
  double solver_tol = 1e-6;  // relative residual of the linear system
  int max_iters = 10000;

  void validate() const;
};

// Minimizes
//   sum_p m_p (u_p - g_p)^2
//   + lambda * sum_p (a_x,p (du/dx)_p^2 + a_y,p (du/dy)_p^2)
// with affinities a_{x,p} = (|d guide/dx|_p^alpha + eps)^-1 from forward
// differences on the guide (zero at the border), i.e. solves the SPD
// system (M + lambda L) u = M g. data_mask m_p in {0,1}; masked-out
// pixels carry no data term and are inpainted by the smoothness term.
// Throws if the relative residual exceeds solver_tol.
// g and data_mask are row-major with the guide's dimensions.
std::vector<double> wls_solve(const std::vector<double>& g,
                              const std::vector<std::uint8_t>& data_mask,
                              const GrayImage& guide, const WlsParams& params);

// Disparity-map front end: invalid pixels get zero data weight, the
// solution is re-quantized to 1/16 fixed point and every pixel of the
// result is valid. lambda = 0 returns the input bitwise.
DisparityMap wls_filter(const DisparityMap& g, const GrayImage& guide,
                        const WlsParams& params);

}  // namespace depthkit
