#pragma once

#include <cstddef>
#include <functional>

namespace loewner {

/// Worker count: LOEWNER_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
unsigned thread_count();

/// Calls body(i) for i in [0, n) on thread_count() threads; results go to
/// per-index slots. After the first exception no new indices start, and it
/// is rethrown once the workers finish.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace loewner
