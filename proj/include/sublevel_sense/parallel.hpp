#pragma once

#include <cstddef>
#include <exception>
#include <functional>

namespace sublevel_sense {

/// Number of worker threads for grid sweeps: hardware concurrency, capped by
/// the SUBLEVEL_SENSE_THREADS environment variable when set.  A malformed or
/// non-positive value is rejected (std::invalid_argument).
std::size_t sweep_thread_count();

/// Runs fn(i) for i in [0, n) with static block partitioning.  Each index
/// writes only its own results, so output order is deterministic regardless
/// of the thread count.  The first exception thrown by any worker is
/// rethrown on the calling thread.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn);

}  // namespace sublevel_sense
