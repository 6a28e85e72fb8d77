#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace sqg {

/// Worker count: SQGLAB_WORKERS env var if set, else hardware concurrency.
inline unsigned worker_count() {
    if (const char* env = std::getenv("SQGLAB_WORKERS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return unsigned(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(i) for i in [0, n).  Each item must be self-contained (own RNG
/// streams, writes only to its own slot), which makes the result independent
/// of scheduling and worker count.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = worker_count();
    if (workers <= 1 || n <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto run = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const unsigned spawn = unsigned(std::min<std::size_t>(workers, n));
    pool.reserve(spawn);
    for (unsigned w = 0; w < spawn; ++w) pool.emplace_back(run);
    for (auto& t : pool) t.join();
}

}  // namespace sqg
