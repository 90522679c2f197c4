#pragma once

#include <cstddef>
#include <functional>

namespace tracebounds {

/// Worker count: TRACEBOUNDS_THREADS if set to a positive integer, else the
/// hardware concurrency (at least 1).
std::size_t thread_count();

/// Calls body(i) for every i in [0, n). Iterations are claimed dynamically by
/// up to thread_count() workers, so body must only write to per-index state.
/// After a failure no new iterations start; the failing iteration with the
/// lowest index is rethrown once all workers have stopped.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

} // namespace tracebounds
