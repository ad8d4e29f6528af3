#pragma once

#include <cstddef>
#include <functional>

namespace dks {

/// Worker count: DKS_THREADS if set and positive, else hardware concurrency.
int default_thread_count();

/// Calls body(i) for i in [0, count) on up to `threads` workers (0 = default).
/// Callers write results into slot i, so output order never depends on scheduling.
/// The first exception thrown by any body is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& body);

}  // namespace dks
