#pragma once

#include <cstddef>
#include <functional>

namespace sigmak {

/// Worker count: SIGMAK_THREADS if set to a positive integer, else the hardware count.
std::size_t thread_cap();

/// Calls body(i) for i in [0, count) on up to `threads` workers. Each index is
/// visited exactly once; callers write results into per-index slots.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  std::size_t threads = thread_cap());

}  // namespace sigmak
