#pragma once

#include <cstddef>
#include <functional>

namespace polysmooth {

/// Worker count: POLYSMOOTH_THREADS if set and positive, else hardware concurrency.
std::size_t worker_count();

/// Calls fn(i) for i in [0, n) on worker threads; the first exception thrown
/// by any call is rethrown after all workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace polysmooth
