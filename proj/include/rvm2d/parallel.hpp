#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace rvm {

// Worker count, from RVM2D_THREADS (default: hardware concurrency capped at 8).
int thread_count();

// Splits [0, n) into a chunk count that depends only on n, never on the worker
// count, and runs body(chunk, begin, end) for each chunk.  Callers that reduce
// must write per-chunk partials and combine them in chunk order afterwards;
// that keeps every result bitwise independent of scheduling.
void parallel_chunks(std::size_t n,
                     const std::function<void(std::size_t, std::size_t, std::size_t)>& body);

std::size_t chunk_count_for(std::size_t n);

// Fixed-shape pairwise tree sum; deterministic for a given vector.
double tree_sum(std::vector<double> v);

}  // namespace rvm
