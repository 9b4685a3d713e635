#pragma once

#include <cstddef>
#include <functional>

namespace mlocal {

/// Number of workers to use when a caller passes 0.
unsigned default_workers();

/// Runs body(i) for i in [0, count) on up to `workers` threads. Indices are
/// handed out in contiguous chunks; body must only write to per-index state.
/// The first exception thrown by any body is rethrown after all workers join.
void parallel_for(std::size_t count, unsigned workers,
                  const std::function<void(std::size_t)>& body);

}  // namespace mlocal
