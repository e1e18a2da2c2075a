#pragma once

#include <cstddef>
#include <functional>

namespace conformal {

/// Worker count: CONFORMAL_KIT_THREADS if set to a positive integer,
/// otherwise std::thread::hardware_concurrency() (at least 1).
std::size_t default_thread_count();

/// Runs task(i) for every i in [0, n) on up to `threads` workers (0 means
/// default_thread_count()). Tasks must write only to slot i of
/// caller-owned storage, so results do not depend on scheduling. The first
/// exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task,
                  std::size_t threads = 0);

}  // namespace conformal
