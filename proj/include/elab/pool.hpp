#pragma once

#include <cstddef>
#include <functional>

namespace elab {

/// Runs task(i) for every i in [0, count) on up to `threads` workers. Results
/// must be written by index so the outcome does not depend on scheduling.
/// The exception of the lowest failing index is rethrown after all workers
/// finish.
void parallel_for(std::size_t count, int threads, const std::function<void(std::size_t)>& task);

}  // namespace elab
