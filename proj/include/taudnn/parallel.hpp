// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <functional>

namespace taudnn {

// Fixed partition of [0, n) into chunks for data-parallel reductions. The
// chunk layout depends only on n, never on the thread count, so reducing
// per-chunk partials in chunk order gives bit-identical results no matter
// how many workers ran.
std::size_t chunk_count(std::size_t n);
std::size_t chunk_begin(std::size_t n, std::size_t chunks, std::size_t c);

// Runs fn(chunk, begin, end) for every chunk, possibly on several threads.
// fn must only write chunk-local state.
void for_each_chunk(std::size_t n,
                    const std::function<void(std::size_t, std::size_t, std::size_t)>& fn);

}  // namespace taudnn
