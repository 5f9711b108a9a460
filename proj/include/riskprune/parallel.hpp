#pragma once

#include <cstddef>
#include <functional>

namespace riskprune {

// worker cap: RISKPRUNE_THREADS when set, hardware concurrency otherwise
unsigned worker_count();

// runs body(i) for i in [0, n); each index is handled exactly once and may
// run on any worker, so bodies must write only to their own slot
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace riskprune
