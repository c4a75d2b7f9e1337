#pragma once

#include <cstddef>
#include <functional>

namespace invforge {

/// Worker count from INVFORGE_THREADS (default 1, minimum 1).
std::size_t worker_threads();

/// Runs fn(i) for i in [0, n), split into contiguous chunks across
/// `threads` workers. Results must not depend on the thread count.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, std::size_t threads = worker_threads());

}  // namespace invforge
