#pragma once

#include <atomic>
#include <cstddef>
#include <thread>
#include <vector>

namespace coalsim {

// Replication thread count used by the batch helpers; 0 means "all cores".
void set_default_threads(unsigned n);
unsigned default_threads();

// Runs fn(i) for i in [0, count) over the configured number of threads.
// Callers key their randomness on i (stream ids), so results are identical
// for any thread count.
template <class Fn>
void parallel_for(std::size_t count, Fn&& fn, unsigned threads = 0) {
    if (threads == 0) threads = default_threads();
    if (threads <= 1 || count < 2) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= count) return;
            fn(i);
        }
    };
    std::vector<std::thread> pool;
    const unsigned spawn = static_cast<unsigned>(
        std::min<std::size_t>(threads, count));
    pool.reserve(spawn - 1);
    for (unsigned k = 1; k < spawn; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
}

// Fills a vector with fn(i); order-independent aggregation by slot.
template <class Fn>
std::vector<double> parallel_samples(std::size_t count, Fn&& fn, unsigned threads = 0) {
    std::vector<double> out(count);
    parallel_for(count, [&](std::size_t i) { out[i] = fn(i); }, threads);
    return out;
}

}  // namespace coalsim
