#pragma once

#include <thread>
#include <vector>

namespace hypcircle {

/// Index-parallel loop with results addressed by index; the output never
/// depends on the worker count.
template <typename F>
void parallel_for(int n, int workers, F&& fn) {
    if (workers <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int w = std::min(workers, n);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(w));
    for (int t = 0; t < w; ++t)
        pool.emplace_back([t, w, n, &fn] {
            for (int i = t; i < n; i += w) fn(i);
        });
    for (auto& th : pool) th.join();
}

}  // namespace hypcircle
