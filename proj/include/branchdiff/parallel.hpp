#ifndef BRANCHDIFF_PARALLEL_HPP
#define BRANCHDIFF_PARALLEL_HPP

#include <cstdlib>
#include <cstddef>
#include <string>
#include <thread>
#include <vector>

namespace branchdiff {

// Thread budget: BRANCHDIFF_THREADS caps parallelism, default hardware concurrency.
inline unsigned thread_budget() {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0)
        hw = 1;
    if (const char* env = std::getenv("BRANCHDIFF_THREADS")) {
        try {
            const long v = std::stol(env);
            if (v >= 1)
                hw = static_cast<unsigned>(v);
        } catch (...) {
            // malformed value: keep default
        }
    }
    return hw;
}

// Static block partition of [0, n); body(i) must be safe to run concurrently.
template <class Body>
inline void parallel_for(std::size_t n, const Body& body) {
    const unsigned nt = thread_budget();
    if (nt <= 1 || n < 2 * nt) {
        for (std::size_t i = 0; i < n; ++i)
            body(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    const std::size_t chunk = (n + nt - 1) / nt;
    for (unsigned t = 0; t < nt; ++t) {
        const std::size_t lo = t * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi)
            break;
        pool.emplace_back([&body, lo, hi] {
            for (std::size_t i = lo; i < hi; ++i)
                body(i);
        });
    }
    for (auto& th : pool)
        th.join();
}

} // namespace branchdiff

#endif
