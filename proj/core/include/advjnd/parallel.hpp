#pragma once

#include <cstddef>
#include <functional>

namespace advjnd {

// Worker count for data-parallel loops. Reads ADVJND_THREADS on every call:
// unset or invalid falls back to the hardware concurrency, "0" or "1" means
// serial. The result is always >= 1.
int configured_workers();

// Run fn(i) for i in [0, count) on up to `workers` threads, splitting the
// range into contiguous chunks. Callers must only write to disjoint,
// index-owned slots; any cross-index aggregation happens afterwards in
// index order so results never depend on the worker count.
void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn);

}  // namespace advjnd
