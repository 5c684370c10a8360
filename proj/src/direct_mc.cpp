#include "coalsim/direct_mc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace coalsim::direct_mc {

PartitionTrajectory simulate_direct(const MassVector& x, double horizon, RngStream& rng) {
    if (horizon < 0.0) throw std::invalid_argument("simulate_direct: horizon must be nonnegative");
    const std::size_t n = x.len();

    PartitionTrajectory traj;
    traj.initial = Partition::trivial(n);
    if (n < 2) return traj;

    std::vector<double> mass(x.masses());
    std::vector<std::vector<int>> blocks(n);
    std::vector<std::size_t> alive(n);
    for (std::size_t i = 0; i < n; ++i) {
        blocks[i] = {static_cast<int>(i + 1)};
        alive[i] = i;
    }

    const MomentStats ms = moments(x);
    double sigma1 = ms.sigma1;
    double sigma2 = ms.sigma2;

    double t = 0.0;
    while (alive.size() > 1) {
        const double rate = (sigma1 * sigma1 - sigma2) / 2.0;
        t += rng.exponential(rate);
        if (t > horizon) break;

        // First endpoint a with weight m_a * (sigma1 - m_a), then b != a with
        // weight m_b; the unordered pair comes out with probability
        // m_a m_b / rate.
        double w_total = 0.0;
        for (std::size_t idx : alive) w_total += mass[idx] * (sigma1 - mass[idx]);
        double u = rng.uniform01() * w_total;
        std::size_t a = alive.back();
        for (std::size_t idx : alive) {
            u -= mass[idx] * (sigma1 - mass[idx]);
            if (u <= 0.0) {
                a = idx;
                break;
            }
        }
        double v = rng.uniform01() * (sigma1 - mass[a]);
        std::size_t b = (alive.front() == a) ? alive.back() : alive.front();
        for (std::size_t idx : alive) {
            if (idx == a) continue;
            v -= mass[idx];
            if (v <= 0.0) {
                b = idx;
                break;
            }
        }

        traj.events.push_back(make_merge_record(t, blocks[a], blocks[b]));

        // Merge b into a.
        sigma2 += 2.0 * mass[a] * mass[b];  // (m_a+m_b)^2 = m_a^2 + m_b^2 + 2 m_a m_b
        mass[a] += mass[b];
        blocks[a].insert(blocks[a].end(), blocks[b].begin(), blocks[b].end());
        blocks[b].clear();
        alive.erase(std::find(alive.begin(), alive.end(), b));
    }
    return traj;
}

PartitionTrajectory simulate_direct(const MassVector& x, double horizon, std::uint64_t seed,
                                    std::uint64_t stream) {
    RngStream rng(seed, stream);
    return simulate_direct(x, horizon, rng);
}

Partition partition_at(const PartitionTrajectory& traj, double q) {
    if (q < 0.0) throw std::invalid_argument("partition_at: q must be nonnegative");
    const std::size_t n = traj.initial.ground_size();
    std::vector<std::vector<int>> blocks(n);
    std::vector<bool> alive(n, true);
    for (std::size_t i = 0; i < n; ++i) blocks[i] = {static_cast<int>(i + 1)};

    for (const MergeRecord& e : traj.events) {
        if (e.time > q) break;
        // Blocks are identified by their smallest member.
        const std::size_t a = static_cast<std::size_t>(e.left.front() - 1);
        const std::size_t b = static_cast<std::size_t>(e.right.front() - 1);
        blocks[a].insert(blocks[a].end(), blocks[b].begin(), blocks[b].end());
        blocks[b].clear();
        alive[b] = false;
    }
    std::vector<std::vector<int>> live;
    for (std::size_t i = 0; i < n; ++i) {
        if (alive[i]) live.push_back(std::move(blocks[i]));
    }
    return Partition::from_blocks(std::move(live));
}

}  // namespace coalsim::direct_mc
