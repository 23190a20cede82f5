#pragma once

#include <cstddef>
#include <functional>

namespace compconj {

// Thread count for parallel maps: COMPCONJ_THREADS when set (>=1), else the
// hardware concurrency capped at 8.
unsigned thread_budget();

// Runs fn(i) for i in [begin, end) across the thread budget. Chunks are
// contiguous so callers can write to disjoint output slots; fn must not touch
// shared mutable state.
void parallel_for(std::size_t begin, std::size_t end,
                  const std::function<void(std::size_t)>& fn);

}  // namespace compconj
