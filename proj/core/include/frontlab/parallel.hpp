#pragma once

#include <cstddef>
#include <functional>

namespace frontlab {

/// Worker count: FRONTLAB_THREADS when set to a positive integer, otherwise
/// std::thread::hardware_concurrency() (at least 1).
unsigned thread_count();

/// Splits [0, n) into contiguous chunks, one per worker, and calls
/// body(begin, end) for each. Partitioning depends only on n and the worker
/// count, so any per-index result is independent of scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

}  // namespace frontlab
