#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <thread>
#include <vector>

namespace qpf::parallel {

// Worker-thread cap shared by all parallel loops. Defaults to QPF_JOBS or
// the hardware thread count.
inline int &max_threads_slot() {
    static int n = [] {
        if (const char *env = std::getenv("QPF_JOBS")) {
            int v = std::atoi(env);
            if (v >= 1) return v;
        }
        unsigned hw = std::thread::hardware_concurrency();
        return hw ? static_cast<int>(hw) : 1;
    }();
    return n;
}

inline int max_threads() { return max_threads_slot(); }
inline void set_max_threads(int n) { max_threads_slot() = std::max(1, n); }

// Runs body(i) for i in [0,n). Work is handed out in fixed-size chunks via an
// atomic cursor; results must be written to per-index slots so the outcome is
// independent of scheduling.
template <typename Body>
void for_each_index(std::ptrdiff_t n, Body &&body, int nthreads = 0, std::ptrdiff_t chunk = 64) {
    if (n <= 0) return;
    if (nthreads <= 0) nthreads = max_threads();
    nthreads = static_cast<int>(std::min<std::ptrdiff_t>(nthreads, (n + chunk - 1) / chunk));
    if (nthreads <= 1) {
        for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::atomic<std::ptrdiff_t> cursor{0};
    auto worker = [&] {
        for (;;) {
            std::ptrdiff_t begin = cursor.fetch_add(chunk, std::memory_order_relaxed);
            if (begin >= n) break;
            std::ptrdiff_t end = std::min(begin + chunk, n);
            for (std::ptrdiff_t i = begin; i < end; ++i) body(i);
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(nthreads) - 1);
    for (int t = 1; t < nthreads; ++t) pool.emplace_back(worker);
    worker();
    for (auto &th : pool) th.join();
}

// Deterministic sum reduction: partials are accumulated per fixed-size chunk
// and combined in chunk order, so the result is bit-identical for any thread
// count.
template <typename Body>
double sum_over(std::ptrdiff_t n, Body &&body, int nthreads = 0, std::ptrdiff_t chunk = 64) {
    if (n <= 0) return 0.0;
    std::ptrdiff_t nchunks = (n + chunk - 1) / chunk;
    std::vector<double> partial(static_cast<size_t>(nchunks), 0.0);
    for_each_index(
        nchunks,
        [&](std::ptrdiff_t c) {
            std::ptrdiff_t begin = c * chunk, end = std::min(begin + chunk, n);
            double acc = 0.0;
            for (std::ptrdiff_t i = begin; i < end; ++i) acc += body(i);
            partial[static_cast<size_t>(c)] = acc;
        },
        nthreads, 1);
    double total = 0.0;
    for (double p : partial) total += p;
    return total;
}

}  // namespace qpf::parallel
