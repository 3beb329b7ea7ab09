#pragma once

// Deterministic work splitting: items are cut into chunks whose boundaries
// depend only on the item count, never on the thread count. Threads pull
// whole chunks, so any per-chunk partial results can be combined in chunk
// order to give thread-count-independent sums.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace riskpde {

inline int resolve_threads(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

// fn(chunk_index, begin, end); chunk boundaries are a pure function of
// (count, chunks).
template <class Fn>
void parallel_chunks(std::size_t count, std::size_t chunks, int threads, Fn&& fn) {
    if (count == 0) return;
    chunks = std::clamp<std::size_t>(chunks, 1, count);
    const int workers = std::min<int>(std::max(threads, 1), static_cast<int>(chunks));
    const std::size_t base = count / chunks, rem = count % chunks;
    auto bounds = [&](std::size_t c) {
        const std::size_t begin = c * base + std::min(c, rem);
        return std::pair{begin, begin + base + (c < rem ? 1 : 0)};
    };
    if (workers <= 1) {
        for (std::size_t c = 0; c < chunks; ++c) {
            auto [b, e] = bounds(c);
            fn(c, b, e);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        try {
            for (std::size_t c; (c = next.fetch_add(1)) < chunks;) {
                auto [b, e] = bounds(c);
                fn(c, b, e);
            }
        } catch (...) {
            const std::scoped_lock lock(error_mu);
            if (!error) error = std::current_exception();
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers) - 1);
    for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    if (error) std::rethrow_exception(error);
}

} // namespace riskpde
