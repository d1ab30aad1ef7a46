#pragma once

#include <atomic>
#include <thread>
#include <vector>

namespace oi {

// Runs fn(0..n_tasks-1) across up to `threads` workers. Tasks own disjoint
// output slots and derived seeds, so results do not depend on scheduling.
template <typename F>
void parallel_for(int n_tasks, int threads, F&& fn) {
    if (threads < 1) threads = 1;
    if (threads == 1 || n_tasks <= 1) {
        for (int i = 0; i < n_tasks; ++i) fn(i);
        return;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= n_tasks) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const int n_workers = std::min(threads, n_tasks);
    pool.reserve(static_cast<size_t>(n_workers));
    for (int t = 0; t < n_workers; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
}

}  // namespace oi
