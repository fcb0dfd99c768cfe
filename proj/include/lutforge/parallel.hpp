#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace lutforge {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    if (const char* env = std::getenv("LUTFORGE_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    unsigned hc = std::thread::hardware_concurrency();
    return hc > 0 ? static_cast<int>(hc) : 1;
}

// Static block partition of [0, count) across `threads` workers.
// Each index is processed exactly once; results must not depend on the split.
inline void parallel_for(int count, int threads, const std::function<void(int, int)>& body) {
    threads = resolve_threads(threads);
    if (threads <= 1 || count <= 1) {
        body(0, count);
        return;
    }
    if (threads > count) threads = count;
    std::vector<std::thread> pool;
    pool.reserve(threads);
    int chunk = (count + threads - 1) / threads;
    for (int t = 0; t < threads; ++t) {
        int begin = t * chunk;
        int end = begin + chunk < count ? begin + chunk : count;
        if (begin >= end) break;
        pool.emplace_back([&body, begin, end] { body(begin, end); });
    }
    for (auto& th : pool) th.join();
}

}  // namespace lutforge
