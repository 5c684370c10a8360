#include "coalsim/bfw.hpp"

#include <algorithm>
#include <queue>
#include <stdexcept>

namespace coalsim::bfw {

WalkPath build_walk(const MassVector& x, const ClockFamily& clocks, double q) {
    if (!(q > 0.0)) throw std::invalid_argument("build_walk: q must be positive");
    if (clocks.size() != x.len()) {
        throw std::invalid_argument("build_walk: clocks were not drawn for this mass vector");
    }
    const std::size_t n = x.len();
    std::vector<double> times(n), sizes(n);
    std::vector<int> jump_blocks(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = clocks.order[k];
        times[k] = clocks.xi[i] / q;
        sizes[k] = x[i];
        jump_blocks[k] = static_cast<int>(i + 1);
    }
    return WalkPath{JumpWalk(std::move(times), std::move(sizes), -1.0), std::move(jump_blocks), q};
}

Exploration explore(const WalkPath& w) {
    const auto& times = w.walk.times();
    const auto& sizes = w.walk.sizes();

    Exploration out;
    double prev_end = 0.0;
    std::size_t i = 0;
    while (i < times.size()) {
        out.free_intervals.emplace_back(prev_end, times[i]);
        Component c;
        c.root = w.jump_blocks[i];
        c.start = times[i];
        c.members.push_back(w.jump_blocks[i]);
        double frontier = c.start + sizes[i];
        std::size_t k = i;
        while (k + 1 < times.size() && times[k + 1] <= frontier) {
            ++k;
            c.members.push_back(w.jump_blocks[k]);
            frontier += sizes[k];
        }
        c.end = frontier;
        prev_end = frontier;
        out.components.push_back(std::move(c));
        i = k + 1;
    }
    return out;
}

OrderedLengths excursion_lengths(const Exploration& e) {
    std::vector<double> lengths;
    lengths.reserve(e.components.size());
    for (const auto& c : e.components) lengths.push_back(c.mass());
    return OrderedLengths::from_unsorted(std::move(lengths));
}

Partition partition_at_q(const MassVector& x, const ClockFamily& clocks, double q) {
    if (q < 0.0) throw std::invalid_argument("partition_at_q: q must be nonnegative");
    if (q == 0.0) return Partition::trivial(x.len());
    const Exploration e = explore(build_walk(x, clocks, q));
    std::vector<std::vector<int>> blocks;
    blocks.reserve(e.components.size());
    for (const auto& c : e.components) blocks.push_back(c.members);
    return Partition::from_blocks(std::move(blocks));
}

WalkPath cut_free_intervals(const WalkPath& w, const Exploration& e) {
    const auto& src_times = w.walk.times();
    const auto& src_sizes = w.walk.sizes();

    std::vector<double> times, sizes;
    std::vector<int> jump_blocks;

    // Each component loses its leading jump; every surviving jump shifts left
    // by the total load-free length removed before it.
    double removed = 0.0;
    double prev_end = 0.0;
    std::size_t idx = 0;
    for (const auto& c : e.components) {
        removed += c.start - prev_end;
        ++idx;  // leading jump, dropped with the free interval
        for (std::size_t m = 1; m < c.members.size(); ++m, ++idx) {
            times.push_back(src_times[idx] - removed);
            sizes.push_back(src_sizes[idx]);
            jump_blocks.push_back(w.jump_blocks[idx]);
        }
        prev_end = c.end;
    }
    return WalkPath{JumpWalk(std::move(times), std::move(sizes), -1.0), std::move(jump_blocks), w.q};
}

namespace {

struct Run {
    std::size_t first_pos = 0;  // 0-based position of the leading block
    double leader_clock = 0.0;  // xi_(first_pos)
    double mass = 0.0;
    std::vector<int> blocks;
    int left = -1;   // neighbor run ids, -1 at the ends
    int right = -1;
    bool alive = true;
};

struct Candidate {
    double q = 0.0;
    int left_run = 0;
    int right_run = 0;
    bool operator>(const Candidate& o) const noexcept {
        if (q != o.q) return q > o.q;
        return right_run > o.right_run;
    }
};

}  // namespace

std::vector<KeyedMerge> merge_events(const MassVector& x, const ClockFamily& clocks) {
    const std::size_t n = x.len();
    std::vector<KeyedMerge> out;
    if (n < 2) return out;

    std::vector<Run> runs(n);
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = clocks.order[k];
        runs[k].first_pos = k;
        runs[k].leader_clock = clocks.xi[i];
        runs[k].mass = x[i];
        runs[k].blocks = {static_cast<int>(i + 1)};
        runs[k].left = (k == 0) ? -1 : static_cast<int>(k - 1);
        runs[k].right = (k + 1 == n) ? -1 : static_cast<int>(k + 1);
    }

    std::priority_queue<Candidate, std::vector<Candidate>, std::greater<Candidate>> heap;
    auto push_candidate = [&](int left_id) {
        const Run& a = runs[static_cast<std::size_t>(left_id)];
        if (a.right < 0) return;
        const Run& b = runs[static_cast<std::size_t>(a.right)];
        heap.push(Candidate{(b.leader_clock - a.leader_clock) / a.mass, left_id, a.right});
    };
    for (std::size_t k = 0; k + 1 < n; ++k) push_candidate(static_cast<int>(k));

    out.reserve(n - 1);
    while (!heap.empty()) {
        const Candidate c = heap.top();
        heap.pop();
        Run& a = runs[static_cast<std::size_t>(c.left_run)];
        Run& b = runs[static_cast<std::size_t>(c.right_run)];
        if (!a.alive || !b.alive || a.right != c.right_run) continue;  // stale entry

        KeyedMerge ev;
        ev.time = c.q;
        ev.absorbed_leader_pos = static_cast<int>(b.first_pos + 1);
        ev.absorber = a.blocks;
        ev.absorbed = b.blocks;
        std::sort(ev.absorber.begin(), ev.absorber.end());
        std::sort(ev.absorbed.begin(), ev.absorbed.end());
        out.push_back(std::move(ev));

        a.mass += b.mass;
        a.blocks.insert(a.blocks.end(), b.blocks.begin(), b.blocks.end());
        a.right = b.right;
        if (b.right >= 0) runs[static_cast<std::size_t>(b.right)].left = c.left_run;
        b.alive = false;
        b.blocks.clear();

        // The pair (a.left, a) is unaffected: a's leading clock and the left
        // neighbor's mass did not change. Only the new right adjacency needs
        // a candidate.
        push_candidate(c.left_run);
    }
    return out;
}

}  // namespace coalsim::bfw
