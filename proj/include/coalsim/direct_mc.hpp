#pragma once

#include <cstdint>
#include <vector>

#include "coalsim/core.hpp"

namespace coalsim::direct_mc {

// Event-driven trajectory of the coalescent started from the trivial
// partition: each event coarsens by exactly one merge, times strictly
// increasing.
struct PartitionTrajectory {
    Partition initial;
    std::vector<MergeRecord> events;
};

// Gillespie simulation of the pairwise dynamics: total rate
// R = sum_{a<b} m_a m_b = (sigma1^2 - sigma2)/2 over the current blocks,
// waiting time Exp(R), pair {a,b} chosen with probability m_a m_b / R.
// Stops when one block remains or the horizon is exceeded; events strictly
// after the horizon are discarded. sigma1/sigma2 are maintained
// incrementally, so each step costs O(current blocks).
PartitionTrajectory simulate_direct(const MassVector& x, double horizon, RngStream& rng);
PartitionTrajectory simulate_direct(const MassVector& x, double horizon, std::uint64_t seed,
                                    std::uint64_t stream = 0);

// Partition after all events with time <= q.
Partition partition_at(const PartitionTrajectory& traj, double q);

}  // namespace coalsim::direct_mc
