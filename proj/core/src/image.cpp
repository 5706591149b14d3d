#include "depthkit/image.hpp"

#include <cstring>

namespace depthkit {

std::size_t DepthMap::valid_count() const {
  std::size_t n = 0;
  for (double d : data) {
    if (!std::isnan(d)) ++n;
  }
  return n;
}

bool bitwise_equal(const DepthMap& a, const DepthMap& b) {
  if (a.height != b.height || a.width != b.width) return false;
  if (a.data.size() != b.data.size()) return false;
  if (a.data.empty()) return true;
  return std::memcmp(a.data.data(), b.data.data(),
                     a.data.size() * sizeof(double)) == 0;
}

}  // namespace depthkit
