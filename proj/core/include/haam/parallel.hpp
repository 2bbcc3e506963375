#pragma once

#include <functional>

namespace haam {

/// Runs body(i) for i in [0, count) on up to `threads` worker threads.
/// Work is split into contiguous blocks; the caller performs any reduction
/// afterwards in index order, so results do not depend on the thread count.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

}  // namespace haam
