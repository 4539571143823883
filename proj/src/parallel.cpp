// SPDX-License-Identifier: Apache-2.0
#include "taudnn/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <thread>
#include <vector>

namespace taudnn {

std::size_t chunk_count(std::size_t n) {
    return std::min<std::size_t>(n, 64);
}

std::size_t chunk_begin(std::size_t n, std::size_t chunks, std::size_t c) {
    return c * n / chunks;
}

void for_each_chunk(std::size_t n,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn) {
    if (n == 0) return;
    const std::size_t chunks = chunk_count(n);
    const std::size_t workers =
        std::min<std::size_t>(chunks, std::max(1u, std::thread::hardware_concurrency()));
    if (workers <= 1 || n < 512) {
        for (std::size_t c = 0; c < chunks; ++c)
            fn(c, chunk_begin(n, chunks, c), chunk_begin(n, chunks, c + 1));
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t c = next.fetch_add(1);
            if (c >= chunks) return;
            fn(c, chunk_begin(n, chunks, c), chunk_begin(n, chunks, c + 1));
        }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers - 1);
    for (std::size_t t = 0; t + 1 < workers; ++t) pool.emplace_back(worker);
    worker();
    for (std::thread& t : pool) t.join();
}

}  // namespace taudnn
