#pragma once

#include <cstddef>
#include <functional>

namespace edgewatch {

/// Worker count: EDGEWATCH_THREADS when set to a positive integer, otherwise
/// the hardware concurrency. An explicit override takes precedence over both.
unsigned thread_count();
void set_thread_override(unsigned threads);  // 0 clears the override

/// Runs body(i) for i in [0, n). Each index is independent, so results do not
/// depend on the schedule. The exception thrown by the lowest failing index
/// is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace edgewatch
