#pragma once

#include <atomic>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace hsfuse {

/// Runs fn(i) for i in [0, n). Work items must write only to their own output
/// slots; with that discipline results do not depend on the schedule. Falls
/// back to a plain loop when hardware offers a single thread or n is tiny.
template <typename Fn>
void parallel_for(size_t n, Fn&& fn) {
    unsigned hw = std::thread::hardware_concurrency();
    size_t workers = std::min<size_t>(hw == 0 ? 1 : hw, n);
    if (workers <= 1) {
        for (size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto body = [&] {
        for (;;) {
            size_t i = next.fetch_add(1);
            if (i >= n || failed.load()) return;
            try {
                fn(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (size_t t = 0; t < workers; ++t) threads.emplace_back(body);
    for (auto& t : threads) t.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

} // namespace hsfuse
