#pragma once

#include <cstddef>
#include <functional>

namespace spencer {

/// Worker count: SPENCER_NUM_THREADS if set, otherwise hardware concurrency.
unsigned thread_count();

/// Runs body(i) for i in [0, n) over contiguous chunks on up to thread_count()
/// threads. The first exception thrown by any chunk is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace spencer
