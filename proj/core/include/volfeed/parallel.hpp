#pragma once

#include <cstddef>
#include <functional>

namespace volfeed {

// Process-wide cap on worker threads (CLI --threads); 0 means use
// hardware_concurrency. Results never depend on the cap: parallel loops may
// only write to per-index slots and all reductions run sequentially.
void set_max_threads(int n);
int max_threads();

// Runs body(i) for i in [0, n) on up to max_threads() workers in contiguous
// blocks. body must not touch shared mutable state except its own slot i.
// Exceptions from workers are captured and the first one is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace volfeed
