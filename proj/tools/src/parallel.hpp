#pragma once

#include <cstddef>
#include <functional>

namespace lle::cli {

/// Runs fn(0) ... fn(n-1) on up to `jobs` threads. The exception of the
/// lowest failing index is rethrown after all workers finish.
void parallel_for(std::size_t n, std::size_t jobs, const std::function<void(std::size_t)>& fn);

}  // namespace lle::cli
