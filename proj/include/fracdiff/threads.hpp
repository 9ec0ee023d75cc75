#pragma once

#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace fracdiff {

/// Worker cap: FRACDIFF_THREADS if set (minimum 1), hardware concurrency
/// otherwise.
inline unsigned thread_count() {
    if (const char* s = std::getenv("FRACDIFF_THREADS")) {
        const long v = std::strtol(s, nullptr, 10);
        if (v >= 1) return static_cast<unsigned>(v);
        return 1;
    }
    const unsigned hc = std::thread::hardware_concurrency();
    return hc ? hc : 1;
}

/// Static block partition of [0, n) across workers. Each index is visited
/// exactly once and writes must be disjoint per index, so results do not
/// depend on the worker count.
template <typename F>
inline void parallel_for(std::size_t n, F&& body) {
    const unsigned workers = std::min<std::size_t>(thread_count(), n ? n : 1);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back([lo, hi, &body] {
            for (std::size_t i = lo; i < hi; ++i) body(i);
        });
    }
    for (auto& t : pool) t.join();
}

} // namespace fracdiff
