#pragma once

#include <cstddef>
#include <functional>
#include <optional>

namespace ddqncd {

// Explicit request if given, else DDQNCD_THREADS, else the hardware count (min 1).
int resolve_threads(std::optional<int> requested);

// Runs fn(0..count-1) on up to `threads` workers. Each index runs exactly once;
// the first exception thrown is rethrown after all workers stop.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& fn);

}  // namespace ddqncd
