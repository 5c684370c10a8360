#pragma once

#include <cstdint>

namespace coalsim {

// Deterministic random stream: a root seed plus a stream id select mutually
// independent substreams, and the same (seed, stream) pair yields the same
// draws on every platform. Monte Carlo replications take consecutive stream
// ids and may run in any order or in parallel.
class RngStream {
public:
    explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

    std::uint64_t next_u64() noexcept;

    // Uniform on [0, 1), 53-bit resolution.
    double uniform01() noexcept;

    // Strictly positive Exp(rate) variate. Throws std::invalid_argument on
    // rate <= 0 (degenerate rate).
    double exponential(double rate);

    // Standard normal (Box-Muller, pairs cached).
    double gaussian() noexcept;

private:
    std::uint64_t state_[4];
    double cached_gaussian_ = 0.0;
    bool has_cached_gaussian_ = false;
};

}  // namespace coalsim
