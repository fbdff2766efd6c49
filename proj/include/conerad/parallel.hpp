#pragma once

#include <cstddef>
#include <functional>

namespace conerad {

/// Worker threads allowed for internal loops: CONERAD_THREADS when set to a
/// positive integer, otherwise the hardware concurrency.
std::size_t thread_budget();

/// Runs body(i) for i in [0, n), split into contiguous chunks across at most
/// thread_budget() threads. Sequential when n < min_parallel.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body, std::size_t min_parallel = 512);

} // namespace conerad
