#include "depthkit/wls.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace depthkit {

void WlsParams::validate() const {
  if (lambda < 0) throw std::invalid_argument("lambda must be >= 0");
  if (!(alpha > 0)) throw std::invalid_argument("alpha must be > 0");
  if (!(eps > 0)) throw std::invalid_argument("eps must be > 0");
  if (!(solver_tol > 0)) throw std::invalid_argument("solver_tol must be > 0");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
}

namespace {

// Unknown count above which the direct factorization gives way to
// preconditioned CG.
constexpr std::size_t kDirectSolveLimit = 600000;

double affinity(float grad, double alpha, double eps) {
  return 1.0 / (std::pow(std::fabs(static_cast<double>(grad)), alpha) + eps);
}

}  // namespace

std::vector<double> wls_solve(const std::vector<double>& g,
                              const std::vector<std::uint8_t>& data_mask,
                              const GrayImage& guide, const WlsParams& params) {
  params.validate();
  const int h = guide.height, w = guide.width;
  const std::size_t n = static_cast<std::size_t>(h) * w;
  if (g.size() != n || data_mask.size() != n) {
    throw std::invalid_argument("wls_solve: size mismatch with guide");
  }
  if (n == 0) return {};
  if (params.lambda == 0.0) return g;

  bool any_data = false;
  for (std::uint8_t m : data_mask) {
    if (m) {
      any_data = true;
      break;
    }
  }
  if (!any_data) {
    throw std::invalid_argument("wls_solve: no valid pixels in the data term");
  }

  using Triplet = Eigen::Triplet<double>;
  std::vector<Triplet> trips;
  trips.reserve(n * 5);
  std::vector<double> diag(n, 0.0);

  Eigen::VectorXd b(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    if (data_mask[i]) {
      diag[i] += 1.0;
      b[static_cast<Eigen::Index>(i)] = g[i];
    } else {
      b[static_cast<Eigen::Index>(i)] = 0.0;
    }
  }

  // Smoothness edges from forward differences on the guide; the border
  // difference is clamped to zero, so border pixels have no outgoing edge.
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * w + x;
      if (x + 1 < w) {
        const float gx = guide.at(y, x + 1) - guide.at(y, x);
        const double wgt = params.lambda * affinity(gx, params.alpha, params.eps);
        const std::size_t j = i + 1;
        diag[i] += wgt;
        diag[j] += wgt;
        trips.emplace_back(static_cast<int>(i), static_cast<int>(j), -wgt);
        trips.emplace_back(static_cast<int>(j), static_cast<int>(i), -wgt);
      }
      if (y + 1 < h) {
        const float gy = guide.at(y + 1, x) - guide.at(y, x);
        const double wgt = params.lambda * affinity(gy, params.alpha, params.eps);
        const std::size_t j = i + w;
        diag[i] += wgt;
        diag[j] += wgt;
        trips.emplace_back(static_cast<int>(i), static_cast<int>(j), -wgt);
        trips.emplace_back(static_cast<int>(j), static_cast<int>(i), -wgt);
      }
    }
  }
  for (std::size_t i = 0; i < n; ++i) {
    trips.emplace_back(static_cast<int>(i), static_cast<int>(i), diag[i]);
  }

  Eigen::SparseMatrix<double> m(static_cast<Eigen::Index>(n),
                                static_cast<Eigen::Index>(n));
  m.setFromTriplets(trips.begin(), trips.end());

  Eigen::VectorXd u;
  if (n <= kDirectSolveLimit) {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver;
    solver.compute(m);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("wls_solve: factorization failed");
    }
    u = solver.solve(b);
  } else {
    Eigen::ConjugateGradient<Eigen::SparseMatrix<double>,
                             Eigen::Lower | Eigen::Upper,
                             Eigen::IncompleteCholesky<double>>
        solver;
    solver.setTolerance(params.solver_tol * 0.1);
    solver.setMaxIterations(params.max_iters);
    solver.compute(m);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("wls_solve: preconditioner failed");
    }
    u = solver.solve(b);
  }

  const double rel = (m * u - b).norm() / b.norm();
  if (!(rel <= params.solver_tol)) {
    std::ostringstream msg;
    msg << "wls_solve: solver did not reach tolerance, relative residual = "
        << rel;
    throw std::runtime_error(msg.str());
  }

  return std::vector<double>(u.data(), u.data() + n);
}

DisparityMap wls_filter(const DisparityMap& g, const GrayImage& guide,
                        const WlsParams& params) {
  params.validate();
  if (g.height != guide.height || g.width != guide.width) {
    throw std::invalid_argument("wls_filter: size mismatch with guide");
  }
  if (params.lambda == 0.0) return g;

  const std::size_t n = g.data.size();
  std::vector<double> values(n, 0.0);
  std::vector<std::uint8_t> mask(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    if (g.data[i] != DisparityMap::kInvalid) {
      mask[i] = 1;
      values[i] = static_cast<double>(g.data[i]) / DisparityMap::kScale;
    }
  }
  const std::vector<double> u = wls_solve(values, mask, guide, params);

  DisparityMap out(g.height, g.width);
  for (std::size_t i = 0; i < n; ++i) {
    long raw = std::lround(u[i] * DisparityMap::kScale);
    raw = std::clamp<long>(raw, DisparityMap::kInvalid + 1,
                           std::numeric_limits<std::int16_t>::max());
    out.data[i] = static_cast<std::int16_t>(raw);
  }
  return out;
}

}  // namespace depthkit
