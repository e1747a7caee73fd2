#pragma once

#include <cstddef>
#include <functional>

namespace twa {

// Worker count used by the data-parallel loops. 0 means hardware concurrency.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(i) for i in [0, n). Each index must write only its own output
/// slot; callers reduce afterwards in index order, so results do not depend
/// on the number of threads.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

/// Splits [0, n) into a fixed number of contiguous chunks that does not
/// depend on the thread count. Used for bit-stable partial sums.
inline constexpr std::size_t kReductionChunks = 64;

}  // namespace twa
