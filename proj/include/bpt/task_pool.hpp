#pragma once

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace bpt {

// Runs independent tasks on up to `workers` threads. Tasks are claimed by
// index, so each task knows its slot and results merged by index are
// identical for any worker count. The first thrown exception is rethrown
// on the calling thread after all workers join.
inline void run_tasks(int workers, const std::vector<std::function<void()>>& tasks) {
    if (workers < 1) workers = 1;
    if (tasks.empty()) return;
    if (workers == 1 || tasks.size() == 1) {
        for (const auto& t : tasks) t();
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr first_error;
    std::mutex error_mutex;
    auto worker = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size()) return;
            try {
                tasks[i]();
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mutex);
                if (!first_error) first_error = std::current_exception();
                failed.store(true, std::memory_order_relaxed);
            }
        }
    };
    std::vector<std::thread> threads;
    const int n = std::min<int>(workers, static_cast<int>(tasks.size()));
    threads.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& t : threads) t.join();
    if (first_error) std::rethrow_exception(first_error);
}

}  // namespace bpt
