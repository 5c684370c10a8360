#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "coalsim/core.hpp"
#include "coalsim/walk.hpp"

namespace coalsim::bfw {

// Breadth-first walk at coalescent time q: unit negative drift and a jump of
// size x_{pi_i} at xi_(i)/q. The same clock family serves every q, so walks
// at different q are coupled through shared randomness.
struct WalkPath {
    JumpWalk walk;                 // drift -1
    std::vector<int> jump_blocks;  // 1-based initial block index per jump (size-biased order)
    double q = 0.0;
};

// q must be positive; use partition_at_q for the q = 0 boundary.
WalkPath build_walk(const MassVector& x, const ClockFamily& clocks, double q);

struct Component {
    int root = 0;                  // leading block, 1-based
    std::vector<int> members;      // breadth-first order, root first
    double start = 0.0;            // excursion interval [start, end]
    double end = 0.0;
    double mass() const noexcept { return end - start; }
};

struct Exploration {
    std::vector<Component> components;  // in exploration (size-biased) order
    std::vector<std::pair<double, double>> free_intervals;  // load-free stretches
};

// Left-to-right sweep over the sorted clocks with a listening frontier
// b = start + (explored mass); a component closes when the next clock rings
// beyond b. Component interval lengths equal component masses exactly.
Exploration explore(const WalkPath& w);

// Component interval lengths, non-increasing. Sums to sigma1(x) exactly up
// to rounding.
OrderedLengths excursion_lengths(const Exploration& e);

// Blocks of the coalescent at time q, one block per explored component.
// q = 0 returns the trivial partition.
Partition partition_at_q(const MassVector& x, const ClockFamily& clocks, double q);

// Cuts every load-free interval together with the jump at its right endpoint
// (the leading block of the next component), concatenating what remains.
// The result has the law of the classical one-q-at-a-time breadth-first
// walk: only non-leading blocks keep their jumps.
WalkPath cut_free_intervals(const WalkPath& w, const Exploration& e);

// One merge per absorbed component, keyed by the position (1-based, in the
// size-biased order) of the absorbed component's leading block. Exactly one
// event exists for every position 2..n.
struct KeyedMerge {
    double time = 0.0;
    int absorbed_leader_pos = 0;
    std::vector<int> absorber;   // blocks, sorted
    std::vector<int> absorbed;   // blocks, sorted
};

// Merge events of the coupled coalescent {partition_at_q(q)}_{q>=0}, derived
// from the adjacent-run dynamics along the size-biased order: runs of
// consecutive positions merge when the gap between their leading clocks is
// covered by the left run's mass. Returned in increasing time order.
std::vector<KeyedMerge> merge_events(const MassVector& x, const ClockFamily& clocks);

}  // namespace coalsim::bfw
