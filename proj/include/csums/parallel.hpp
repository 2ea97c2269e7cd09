#pragma once

#include <cstddef>
#include <functional>

namespace csums {

// Worker count: CONTINUUM_SUMS_THREADS when set and positive, otherwise the
// hardware concurrency (0 in the variable also means "auto").
unsigned worker_count();

// Runs fn(i) for i in [0, count). Each index is visited exactly once; callers
// write results by index so the outcome never depends on scheduling.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& fn);

}  // namespace csums
