#pragma once

#include <cstddef>
#include <functional>

namespace sig2d {

/// Worker count used by batch drivers. Defaults to SIG2D_THREADS if set,
/// else the hardware concurrency.
std::size_t num_threads();
void set_num_threads(std::size_t n);

/// Runs body(i) for i in [0, n) on up to num_threads() threads. Callers write
/// results into slot i so the output order never depends on scheduling. The
/// first exception thrown by any task is rethrown after all workers join.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace sig2d
