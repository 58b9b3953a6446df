#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace gpr {

// Runs fn(i) for i in [0, n). Work items must be independent; callers that
// aggregate afterwards must do so in an order that does not depend on the
// worker count (see pairwise reduction in style.hpp).
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::size_t n_threads = std::min<std::size_t>(static_cast<std::size_t>(workers), n);
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        pool.emplace_back([&, t]() {
            for (std::size_t i = t; i < n; i += n_threads) fn(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace gpr
