#pragma once

#include <cstddef>
#include <functional>

namespace sideband {

// Worker count for data-parallel sweeps; capped by SIDEBAND_THREADS.
std::size_t worker_count();

// Runs fn(i) for i in [0, n) on a pool of workers. Exceptions thrown by fn
// are rethrown on the calling thread (first one wins).
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sideband
