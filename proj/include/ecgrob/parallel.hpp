// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace ecgrob {

// Worker count: ECGROB_THREADS if set, else hardware concurrency.
unsigned default_thread_count();

// Runs fn(i) for i in [0, n) on up to `threads` workers. Each index is
// processed exactly once; results must be written to per-index slots so the
// outcome is independent of scheduling. The exception from the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  unsigned threads = default_thread_count());

}  // namespace ecgrob
