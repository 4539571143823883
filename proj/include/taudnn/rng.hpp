// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>

namespace taudnn {

// Counter-based pseudo random generator (splitmix64). The state is a plain
// 64-bit counter advanced by a fixed odd constant; each output is a bijective
// hash of the counter, so streams are reproducible bit for bit across
// platforms and runs. split() derives an independent stream usable in
// parallel with the parent.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64();

    // Uniform in [0, 1), 53-bit resolution.
    double next_double();

    // Uniform in [lo, hi). Throws std::invalid_argument if lo >= hi.
    double uniform(double lo, double hi);

    // Independent child stream; also advances this stream by one draw.
    SplitMix64 split();

    bool operator==(const SplitMix64& o) const { return state_ == o.state_; }

private:
    std::uint64_t state_;
};

}  // namespace taudnn
