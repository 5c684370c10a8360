#pragma once

#include <cstddef>
#include <vector>

#include "coalsim/core.hpp"
#include "coalsim/stats.hpp"

namespace coalsim::uribe {

// Half-line k (1-based): s -> intercepts[k-1] - slope_mags[k-1] * s, with
// intercept xi_(k) and slope magnitude x_{pi_1} + ... + x_{pi_{k-1}}. Line k
// is matched to initial block pi_k. stop_times[k-1] is s_k, the earliest
// intersection with a lower-indexed line, and targets[k-1] is that line;
// line 1 never stops (s_1 = +infinity, target 0).
struct Diagram {
    std::vector<double> intercepts;
    std::vector<double> slope_mags;
    std::vector<double> stop_times;
    std::vector<int> targets;       // 1-based line index, 0 for line 1
    std::vector<int> line_blocks;   // pi_k, 1-based block index
    std::vector<double> line_masses;

    std::size_t size() const noexcept { return intercepts.size(); }
};

// Intersection times are solved in closed form. The minimum over j < k is
// taken with an upper-envelope sweep (amortized O(n) after sorting); the
// result is identical to the direct pairwise minimum.
Diagram build_diagram(const MassVector& x, const ClockFamily& clocks);

// Direct O(n^2) evaluation of (s_k, l_k); the independent reference for the
// envelope sweep.
Diagram build_diagram_naive(const MassVector& x, const ClockFamily& clocks);

struct Event {
    double time = 0.0;
    int absorber = 0;  // line index whose class receives the contents
    int absorbed = 0;  // line index whose class empties
};

struct UribeCoalescent {
    std::vector<Event> events;  // increasing time; exactly n-1 of them
    std::vector<int> line_blocks;
    std::vector<double> line_masses;
    // Events whose static target was already absorbed when processed in time
    // order. The dynamic lowest-active-line rule is applied and the instance
    // counted; expected to stay 0.
    std::size_t discrepancies = 0;
};

UribeCoalescent run_coalescent(const Diagram& d);

// Ordered nonzero class masses M_i(s).
OrderedLengths mass_process(const UribeCoalescent& uc, double s);

// Partition T(s) of {1..n} after all events with time <= s.
Partition partition_at(const UribeCoalescent& uc, double s);

// Merge events keyed by the absorbed line index (one per line 2..n), with
// the full block contents of both classes at merge time.
struct KeyedMerge {
    double time = 0.0;
    int absorbed_line = 0;
    std::vector<int> absorber;  // blocks, sorted
    std::vector<int> absorbed;  // blocks, sorted
};

std::vector<KeyedMerge> merge_events(const UribeCoalescent& uc);

// Time of the last coalescence, max_k s_k.
double connectivity_time(const Diagram& d);

// Empirical check that the first coalescence time S is independent of the
// size-biased permutation pi, and that S ~ Exp(sum_{i<j} x_i x_j).
struct IndependenceReport {
    stats::TestReport independence;  // chi-square on (pi, binned S)
    stats::TestReport s_marginal;    // KS of S against the exponential law
    double rate = 0.0;               // sum_{i<j} x_i x_j
    bool pass = false;
};

IndependenceReport check_S_pi_independence(const MassVector& x, std::size_t samples,
                                           std::uint64_t seed, double alpha = 0.001);

}  // namespace coalsim::uribe
