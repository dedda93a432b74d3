#pragma once

#include <cstddef>
#include <functional>

namespace swk {

/// Worker count: SWK_THREADS if set and positive, else hardware concurrency.
std::size_t thread_count();

/// Runs body(i) for i in [0, n); calls made from inside a worker run serially.
/// Each index is handled by exactly one worker,
/// so results written to slot i do not depend on the worker count. The
/// exception thrown for the lowest failing index is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body);

}  // namespace swk
