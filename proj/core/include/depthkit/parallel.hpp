#pragma once

#include <cstddef>
#include <functional>

namespace depthkit {

// Global worker count for data-parallel loops. 0 (default) means
// hardware_concurrency. Set to 1 to force serial execution.
void set_num_threads(int n);
int num_threads();

// Runs fn(i) for every i in [0, n). Indices are split into contiguous
// chunks, one per worker. Each index must write only its own outputs;
// under that contract the result is bitwise identical for any worker
// count, which the pipelines rely on.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace depthkit
