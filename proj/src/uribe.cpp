#include "coalsim/uribe.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

namespace coalsim::uribe {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Diagram diagram_shell(const MassVector& x, const ClockFamily& clocks) {
    if (clocks.size() != x.len()) {
        throw std::invalid_argument("build_diagram: clocks were not drawn for this mass vector");
    }
    const std::size_t n = x.len();
    Diagram d;
    d.intercepts.resize(n);
    d.slope_mags.resize(n);
    d.stop_times.assign(n, kInf);
    d.targets.assign(n, 0);
    d.line_blocks.resize(n);
    d.line_masses.resize(n);
    double cum = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = clocks.order[k];
        d.intercepts[k] = clocks.xi[i];
        d.slope_mags[k] = cum;
        d.line_blocks[k] = static_cast<int>(i + 1);
        d.line_masses[k] = x[i];
        cum += x[i];
    }
    return d;
}

}  // namespace

Diagram build_diagram_naive(const MassVector& x, const ClockFamily& clocks) {
    Diagram d = diagram_shell(x, clocks);
    for (std::size_t k = 1; k < d.size(); ++k) {
        double best = kInf;
        int arg = 0;
        for (std::size_t j = 0; j < k; ++j) {
            const double s = (d.intercepts[k] - d.intercepts[j]) / (d.slope_mags[k] - d.slope_mags[j]);
            if (s < best) {
                best = s;
                arg = static_cast<int>(j + 1);
            }
        }
        d.stop_times[k] = best;
        d.targets[k] = arg;
    }
    return d;
}

Diagram build_diagram(const MassVector& x, const ClockFamily& clocks) {
    Diagram d = diagram_shell(x, clocks);
    const std::size_t n = d.size();
    if (n < 2) return d;

    // Upper envelope of lines 1..k-1, as (line index, validity end) pieces in
    // time order. Line k starts above every earlier line and falls faster, so
    // it meets the envelope exactly once; pieces ending before that crossing
    // are dominated by line k and never resurface.
    struct Piece {
        std::size_t line;
        double end;
    };
    std::deque<Piece> env;
    env.push_back({0, kInf});
    for (std::size_t k = 1; k < n; ++k) {
        double s_k = kInf;
        std::size_t target = 0;
        while (!env.empty()) {
            const Piece& p = env.front();
            const double s = (d.intercepts[k] - d.intercepts[p.line]) /
                             (d.slope_mags[k] - d.slope_mags[p.line]);
            if (s <= p.end) {
                s_k = s;
                target = p.line;
                break;
            }
            env.pop_front();
        }
        d.stop_times[k] = s_k;
        d.targets[k] = static_cast<int>(target + 1);
        env.push_front({k, s_k});
    }
    return d;
}

UribeCoalescent run_coalescent(const Diagram& d) {
    const std::size_t n = d.size();
    UribeCoalescent uc;
    uc.line_blocks = d.line_blocks;
    uc.line_masses = d.line_masses;
    if (n < 2) return uc;

    std::vector<std::size_t> by_time(n - 1);
    std::iota(by_time.begin(), by_time.end(), std::size_t{1});
    std::sort(by_time.begin(), by_time.end(), [&](std::size_t a, std::size_t b) {
        if (d.stop_times[a] != d.stop_times[b]) return d.stop_times[a] < d.stop_times[b];
        return a < b;
    });

    // absorbed_into[k] >= 0 once line k's class has emptied.
    std::vector<int> absorbed_into(n, -1);
    auto active_rep = [&](std::size_t line) {
        while (absorbed_into[line] >= 0) line = static_cast<std::size_t>(absorbed_into[line]);
        return line;
    };

    uc.events.reserve(n - 1);
    for (std::size_t k : by_time) {
        std::size_t target = static_cast<std::size_t>(d.targets[k] - 1);
        if (absorbed_into[target] >= 0) {
            // Static target already gone; the dynamic rule redirects to the
            // active class that swallowed it.
            ++uc.discrepancies;
            target = active_rep(target);
        }
        absorbed_into[k] = static_cast<int>(target);
        uc.events.push_back(Event{d.stop_times[k], static_cast<int>(target + 1),
                                  static_cast<int>(k + 1)});
    }
    return uc;
}

namespace {

// Class contents per line after events with time <= s.
std::vector<std::vector<int>> contents_at(const UribeCoalescent& uc, double s) {
    const std::size_t n = uc.line_blocks.size();
    std::vector<std::vector<int>> contents(n);
    for (std::size_t k = 0; k < n; ++k) contents[k] = {uc.line_blocks[k]};
    for (const Event& e : uc.events) {
        if (e.time > s) break;
        auto& from = contents[static_cast<std::size_t>(e.absorbed - 1)];
        auto& to = contents[static_cast<std::size_t>(e.absorber - 1)];
        to.insert(to.end(), from.begin(), from.end());
        from.clear();
    }
    return contents;
}

}  // namespace

OrderedLengths mass_process(const UribeCoalescent& uc, double s) {
    if (s < 0.0) throw std::invalid_argument("mass_process: s must be nonnegative");
    const std::size_t n = uc.line_blocks.size();
    std::vector<double> mass(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) mass[k] = uc.line_masses[k];
    for (const Event& e : uc.events) {
        if (e.time > s) break;
        mass[static_cast<std::size_t>(e.absorber - 1)] += mass[static_cast<std::size_t>(e.absorbed - 1)];
        mass[static_cast<std::size_t>(e.absorbed - 1)] = 0.0;
    }
    std::vector<double> nonzero;
    nonzero.reserve(n);
    for (double m : mass) {
        if (m > 0.0) nonzero.push_back(m);
    }
    return OrderedLengths::from_unsorted(std::move(nonzero));
}

Partition partition_at(const UribeCoalescent& uc, double s) {
    if (s < 0.0) throw std::invalid_argument("partition_at: s must be nonnegative");
    std::vector<std::vector<int>> blocks;
    for (auto& c : contents_at(uc, s)) {
        if (!c.empty()) blocks.push_back(std::move(c));
    }
    return Partition::from_blocks(std::move(blocks));
}

std::vector<KeyedMerge> merge_events(const UribeCoalescent& uc) {
    const std::size_t n = uc.line_blocks.size();
    std::vector<std::vector<int>> contents(n);
    for (std::size_t k = 0; k < n; ++k) contents[k] = {uc.line_blocks[k]};

    std::vector<KeyedMerge> out;
    out.reserve(uc.events.size());
    for (const Event& e : uc.events) {
        auto& from = contents[static_cast<std::size_t>(e.absorbed - 1)];
        auto& to = contents[static_cast<std::size_t>(e.absorber - 1)];
        KeyedMerge m;
        m.time = e.time;
        m.absorbed_line = e.absorbed;
        m.absorber = to;
        m.absorbed = from;
        std::sort(m.absorber.begin(), m.absorber.end());
        std::sort(m.absorbed.begin(), m.absorbed.end());
        out.push_back(std::move(m));
        to.insert(to.end(), from.begin(), from.end());
        from.clear();
    }
    return out;
}

double connectivity_time(const Diagram& d) {
    if (d.size() < 2) return 0.0;
    double last = 0.0;
    for (std::size_t k = 1; k < d.size(); ++k) last = std::max(last, d.stop_times[k]);
    return last;
}

IndependenceReport check_S_pi_independence(const MassVector& x, std::size_t samples,
                                           std::uint64_t seed, double alpha) {
    const std::size_t n = x.len();
    if (n < 2) throw std::invalid_argument("check_S_pi_independence: need n >= 2");

    double rate = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) rate += x[i] * x[j];
    }

    // Equiprobable bins of Exp(rate) for the S margin.
    constexpr std::size_t kBins = 8;
    std::vector<double> edges(kBins - 1);
    for (std::size_t b = 0; b + 1 < kBins; ++b) {
        edges[b] = -std::log(1.0 - static_cast<double>(b + 1) / kBins) / rate;
    }

    std::map<std::vector<std::size_t>, std::size_t> perm_index;
    std::vector<std::vector<std::uint64_t>> table;
    std::vector<double> s_values(samples);

    for (std::size_t rep = 0; rep < samples; ++rep) {
        RngStream rng(seed, rep);
        const ClockFamily clocks = draw_clocks(x, rng);
        const Diagram d = build_diagram(x, clocks);
        double s_min = kInf;
        for (std::size_t k = 1; k < n; ++k) s_min = std::min(s_min, d.stop_times[k]);
        s_values[rep] = s_min;

        auto [it, inserted] = perm_index.try_emplace(clocks.order, perm_index.size());
        if (inserted) table.emplace_back(kBins, 0);
        const std::size_t bin = static_cast<std::size_t>(
            std::lower_bound(edges.begin(), edges.end(), s_min) - edges.begin());
        ++table[it->second][bin];
    }

    IndependenceReport rep;
    rep.rate = rate;
    rep.independence =
        stats::chi_square_independence(table, "S_pi_independence", alpha);
    rep.s_marginal = stats::ks_one_sample(
        std::move(s_values), [rate](double s) { return stats::exponential_cdf(s, rate); },
        "S_exponential_marginal", alpha);
    rep.pass = rep.independence.pass && rep.s_marginal.pass;
    return rep;
}

}  // namespace coalsim::uribe
