#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace esir {

/// Worker-thread cap: ESIR_THREADS if set and positive, otherwise
/// std::thread::hardware_concurrency() (at least 1).
std::size_t worker_threads();

namespace detail {
// Set on threads executing parallel_for items; nested calls run serially.
inline thread_local bool in_parallel_region = false;
}  // namespace detail

/// Runs fn(i) for i in [0, count) across up to worker_threads() threads.
/// Work items are pulled from a shared counter, so fn must write its result
/// into a slot owned by i; any reduction happens afterwards in index order.
/// The first exception thrown by any item is rethrown on the caller.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn) {
    const std::size_t threads = std::min(worker_threads(), count);
    if (threads <= 1 || detail::in_parallel_region) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        const bool outer = detail::in_parallel_region;
        detail::in_parallel_region = true;
        for (;;) {
            const std::size_t i = next.fetch_add(1, std::memory_order_relaxed);
            if (i >= count) break;
            try {
                fn(i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
                next.store(count, std::memory_order_relaxed);
            }
        }
        detail::in_parallel_region = outer;
    };
    std::vector<std::jthread> pool;
    pool.reserve(threads - 1);
    for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
    pool.clear();
    if (failure) std::rethrow_exception(failure);
}

}  // namespace esir
