#pragma once

#include <cstddef>
#include <functional>

namespace edgeuda {

// Worker cap: EDGEUDA_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
int worker_count();

// Runs body(i) for i in [0, count). Iterations are distributed over at most
// worker_count() threads. Callers must write disjoint outputs per index and
// reduce in index order afterwards; results are then independent of the
// thread count.
void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body);

}  // namespace edgeuda
