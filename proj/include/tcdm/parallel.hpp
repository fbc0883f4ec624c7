#pragma once

#include <cstddef>
#include <functional>

namespace tcdm {

/// Worker count to use when the caller asked for `requested` (0 = automatic).
/// Automatic reads TCDM_THREADS, then falls back to the hardware concurrency.
std::size_t resolve_thread_count(std::size_t requested);

/// Runs body(i) for every i in [0, n) on up to `threads` workers. Results must
/// be written to per-index slots; the first exception thrown is rethrown here
/// after all workers stop.
void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body);

}  // namespace tcdm
