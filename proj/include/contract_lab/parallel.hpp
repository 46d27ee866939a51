#pragma once

#include <cstddef>
#include <functional>

namespace contract_lab {

/// Worker count: CONTRACT_LAB_THREADS if set (>= 1), else hardware concurrency.
unsigned default_thread_count();

/// Runs body(i) for i in [0, n) on up to `threads` workers (0 = default_thread_count()).
/// Iterations are split into contiguous blocks; callers write results by index so the
/// output never depends on scheduling. The first exception thrown is rethrown.
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& body);

/// Pairwise (tree) summation in index order; the result is independent of thread count.
double pairwise_sum(const double* values, std::size_t n);

} // namespace contract_lab
