#pragma once

// Minimal index-parallel loop. Results are written by index, so the output
// does not depend on the thread count or on scheduling.

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace qdcav {

inline int resolve_thread_count(int requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Calls body(i) for i in [0, n). If any call throws, the exception from the
// smallest failing index is rethrown after all workers finish.
inline void parallel_for(std::size_t n, int threads, const std::function<void(std::size_t)>& body) {
    const auto workers = static_cast<std::size_t>(std::min<std::size_t>(
        static_cast<std::size_t>(resolve_thread_count(threads)), std::max<std::size_t>(n, 1)));
    std::exception_ptr first_error;
    std::size_t first_index = n;
    std::mutex m;
    auto run_one = [&](std::size_t i) {
        try {
            body(i);
        } catch (...) {
            std::lock_guard lock(m);
            if (i < first_index) {
                first_index = i;
                first_error = std::current_exception();
            }
        }
    };
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < n; i = next++) run_one(i);
            });
    }
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace qdcav
