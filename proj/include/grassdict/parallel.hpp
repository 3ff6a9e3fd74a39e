#pragma once

#include <cstddef>
#include <functional>

namespace grassdict {

/// Worker count: GRASSDICT_THREADS when set to a positive integer, otherwise
/// the hardware concurrency (at least 1).
[[nodiscard]] unsigned thread_count();

/// Runs body(i) for i in [0, n) across up to thread_count() threads using
/// contiguous static chunks. body must only write to per-index state.
/// The first exception thrown by any chunk is rethrown on the caller.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace grassdict
