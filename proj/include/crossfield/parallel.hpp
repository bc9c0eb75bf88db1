#pragma once

#include <cstddef>
#include <functional>

namespace crossfield {

/// Number of workers to use for a request of `threads` (0 = hardware).
unsigned resolve_threads(unsigned threads);

/// Calls body(i) for i in [0, count) on up to `threads` workers. Results must
/// be written to per-index slots; the first exception thrown by any worker is
/// rethrown after all workers join.
void parallel_for(std::size_t count, unsigned threads, const std::function<void(std::size_t)>& body);

} // namespace crossfield
