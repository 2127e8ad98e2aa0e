#pragma once

#include <cstddef>
#include <functional>
#include <vector>

namespace nearfield {

/// Worker count from NEARFIELD_WORKERS, else the hardware concurrency.
int worker_count();

/// Runs task(i) for i in [0, n) on the worker pool. Results are written by
/// index, so ordering never depends on completion order. Calls made from
/// inside a worker run serially.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& task);

template <class T, class F>
std::vector<T> parallel_map(std::size_t n, F&& f)
{
    std::vector<T> out(n);
    parallel_for(n, [&](std::size_t i) { out[i] = f(i); });
    return out;
}

} // namespace nearfield
