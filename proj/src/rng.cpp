#include "coalsim/rng.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace coalsim {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) noexcept {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
}

}  // namespace

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream) noexcept {
    // Two splitmix rounds decorrelate nearby (seed, stream) pairs before the
    // xoshiro state is filled.
    std::uint64_t x = seed ^ rotl(stream * 0xD2B74407B1CE6E93ULL, 17);
    splitmix64(x);
    splitmix64(x);
    state_[0] = splitmix64(x);
    state_[1] = splitmix64(x);
    state_[2] = splitmix64(x);
    state_[3] = splitmix64(x);
    // All-zero state is invalid for xoshiro256++.
    if ((state_[0] | state_[1] | state_[2] | state_[3]) == 0) state_[3] = 1;
}

std::uint64_t RngStream::next_u64() noexcept {
    // xoshiro256++
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
}

double RngStream::uniform01() noexcept {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::exponential(double rate) {
    if (!(rate > 0.0)) {
        throw std::invalid_argument("exponential: rate must be positive");
    }
    for (;;) {
        const double u = uniform01();
        const double v = -std::log1p(-u) / rate;
        if (v > 0.0) return v;  // u == 0 would give 0: redraw
    }
}

double RngStream::gaussian() noexcept {
    if (has_cached_gaussian_) {
        has_cached_gaussian_ = false;
        return cached_gaussian_;
    }
    double u1 = uniform01();
    while (u1 == 0.0) u1 = uniform01();
    const double u2 = uniform01();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_gaussian_ = r * std::sin(a);
    has_cached_gaussian_ = true;
    return r * std::cos(a);
}

}  // namespace coalsim
