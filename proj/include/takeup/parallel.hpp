#pragma once

#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace takeup {

// Worker count: TAKEUP_THREADS if set, else hardware concurrency (capped).
inline unsigned thread_count() {
    if (const char* env = std::getenv("TAKEUP_THREADS")) {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1) return static_cast<unsigned>(n > 64 ? 64 : n);
    }
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    return hw > 8 ? 8 : hw;
}

namespace parallel_detail {
inline thread_local bool inside_parallel_region = false;
}

// Runs fn(i) for i in [0, n) across workers. Each index is processed exactly
// once; fn must write only to its own slot of any shared output. Nested
// calls run serially so outer parallelism is not oversubscribed.
inline void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn) {
    const unsigned workers = thread_count();
    if (workers <= 1 || n <= 1 || parallel_detail::inside_parallel_region) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::thread> pool;
    const std::size_t chunk = (n + workers - 1) / workers;
    for (unsigned w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        if (lo >= n) break;
        const std::size_t hi = lo + chunk < n ? lo + chunk : n;
        pool.emplace_back([lo, hi, &fn] {
            parallel_detail::inside_parallel_region = true;
            for (std::size_t i = lo; i < hi; ++i) fn(i);
        });
    }
    for (auto& t : pool) t.join();
}

// Deterministic parallel reduction: partial sums are computed per fixed-size
// block and combined in block order, so the result is bit-identical for any
// worker count. `accumulate(i, acc)` must add item i into acc.
template <typename Acc>
Acc blocked_reduce(std::size_t n, const Acc& zero,
                   const std::function<void(std::size_t, Acc&)>& accumulate,
                   const std::function<void(Acc&, const Acc&)>& combine,
                   std::size_t block = 256) {
    if (n == 0) return zero;
    const std::size_t nblocks = (n + block - 1) / block;
    std::vector<Acc> partials(nblocks, zero);
    parallel_for(nblocks, [&](std::size_t b) {
        const std::size_t lo = b * block;
        const std::size_t hi = lo + block < n ? lo + block : n;
        for (std::size_t i = lo; i < hi; ++i) accumulate(i, partials[b]);
    });
    Acc total = zero;
    for (const Acc& p : partials) combine(total, p);
    return total;
}

}  // namespace takeup
