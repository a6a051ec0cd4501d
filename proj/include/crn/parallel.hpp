#pragma once

#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace crn {

/// Runs fn(0..n-1) across `threads` workers in contiguous chunks. Results must
/// be written to per-index slots; the partition is deterministic, so outputs
/// do not depend on the thread count. The first exception thrown by any worker
/// is rethrown after all join.
inline void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    if (threads <= 1 || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(static_cast<size_t>(workers));
    pool.reserve(static_cast<size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&, w]() {
            const int lo = static_cast<int>(static_cast<long>(n) * w / workers);
            const int hi = static_cast<int>(static_cast<long>(n) * (w + 1) / workers);
            try {
                for (int i = lo; i < hi; ++i) fn(i);
            } catch (...) {
                errors[static_cast<size_t>(w)] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

}  // namespace crn
