// parallel.hpp
// Block-parallel execution over an index range. Work is cut into fixed-size
// blocks that are self-contained, so results are bit-identical for any
// worker count or scheduling order.

#pragma once

#include <atomic>
#include <cstdlib>
#include <functional>
#include <thread>
#include <vector>

namespace statarb {

/// Worker count: STATARB_WORKERS if set (>= 1), else hardware concurrency.
inline int worker_count() {
    if (const char* env = std::getenv("STATARB_WORKERS")) {
        const int parsed = std::atoi(env);
        if (parsed >= 1) return parsed;
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

/// Runs fn(begin, end) over [0, n) in blocks of block_size. Exceptions from
/// workers are rethrown on the calling thread.
inline void parallel_blocks(int n, int block_size,
                            const std::function<void(int, int)>& fn) {
    if (n <= 0) return;
    const int workers = std::min(worker_count(), (n + block_size - 1) / block_size);
    if (workers <= 1) {
        for (int begin = 0; begin < n; begin += block_size)
            fn(begin, std::min(begin + block_size, n));
        return;
    }
    std::atomic<int> next_block{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    const int n_blocks = (n + block_size - 1) / block_size;
    auto worker = [&] {
        while (true) {
            const int block = next_block.fetch_add(1);
            if (block >= n_blocks || failed.load()) return;
            const int begin = block * block_size;
            try {
                fn(begin, std::min(begin + block_size, n));
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    if (failed.load() && error) std::rethrow_exception(error);
}

}  // namespace statarb
