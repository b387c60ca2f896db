#pragma once

#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace futurecone {

/// Worker cap: FUTURECONE_THREADS when set to a positive integer, otherwise
/// the hardware concurrency.
inline unsigned max_workers() {
    unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("FUTURECONE_THREADS")) {
        char* end = nullptr;
        long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
    }
    return hw;
}

namespace detail {
inline bool& in_parallel_region() {
    thread_local bool flag = false;
    return flag;
}
} // namespace detail

/// Index-based parallel loop. Work items must be independent; results keyed
/// by index so aggregation order never depends on scheduling. Nested calls
/// run serially.
template <typename Fn>
void parallel_for(size_t n, Fn&& fn) {
    unsigned workers = max_workers();
    if (n == 0) return;
    if (workers <= 1 || n == 1 || detail::in_parallel_region()) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    workers = static_cast<unsigned>(std::min<size_t>(workers, n));
    std::atomic<size_t> cursor{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex err_mu;
    for (unsigned w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            detail::in_parallel_region() = true;
            for (;;) {
                size_t i = cursor.fetch_add(1);
                if (i >= n || failed.load()) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lk(err_mu);
                    if (!first_error) first_error = std::current_exception();
                    failed.store(true);
                    break;
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

} // namespace futurecone
