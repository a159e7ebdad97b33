#pragma once

#include <atomic>
#include <cstdlib>
#include <string>
#include <thread>
#include <vector>

namespace contractlab {

// Worker count: CONTRACTLAB_THREADS wins if set and positive, otherwise the
// hardware concurrency. All parallel loops below must be invoked with
// order-independent bodies; deterministic merges are the caller's job.
inline unsigned worker_count() {
    if (const char* env = std::getenv("CONTRACTLAB_THREADS")) {
        char* end = nullptr;
        const long n = std::strtol(env, &end, 10);
        if (end != env && n > 0) return static_cast<unsigned>(n);
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

// Static block partition: body(worker, begin, end) runs once per worker on a
// contiguous index range. Workers receive near-equal shares; worker ids are
// stable, so per-worker accumulators can be merged in a fixed order.
template <class Body>
void parallel_blocks(std::size_t n, Body&& body) {
    const std::size_t workers =
        std::min<std::size_t>(worker_count(), n == 0 ? 1 : n);
    if (workers <= 1) {
        body(std::size_t{0}, std::size_t{0}, n);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(workers);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = std::min(n, w * chunk);
        const std::size_t end = std::min(n, begin + chunk);
        pool.emplace_back([&body, w, begin, end] { body(w, begin, end); });
    }
    for (auto& t : pool) t.join();
}

template <class Fn>
void parallel_for(std::size_t n, Fn&& fn) {
    parallel_blocks(n, [&fn](std::size_t, std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) fn(i);
    });
}

}  // namespace contractlab
