#include "coalsim/limit.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace coalsim::limit {

void validate(const ParamTriple& p) {
    if (!(p.kappa >= 0.0) || !std::isfinite(p.kappa)) {
        throw std::invalid_argument("ParamTriple: kappa must be nonnegative");
    }
    if (!std::isfinite(p.tau)) throw std::invalid_argument("ParamTriple: tau must be finite");
    for (std::size_t j = 0; j < p.c.size(); ++j) {
        if (!(p.c[j] >= 0.0) || !std::isfinite(p.c[j])) {
            throw std::invalid_argument("ParamTriple: c entries must be nonnegative");
        }
        if (j > 0 && p.c[j] > p.c[j - 1]) {
            throw std::invalid_argument("ParamTriple: c must be non-increasing");
        }
    }
}

double default_horizon(const ParamTriple& p, double t) {
    validate(p);
    if (!(p.kappa > 0.0)) {
        throw std::invalid_argument(
            "default_horizon: kappa = 0 needs an explicitly configured horizon");
    }
    double c_sum = 0.0;
    for (double cj : p.c) c_sum += cj;
    return std::max(6.0, 2.0 * (std::abs(t - p.tau) + c_sum) / p.kappa);
}

namespace {

struct Timeline {
    std::vector<double> times;
    std::vector<double> jumps;  // aligned with times
};

Timeline merge_timeline(double grid_step, double horizon,
                        const std::vector<double>& jump_times,
                        const std::vector<double>& jump_sizes) {
    // Sorted jump events inside (0, horizon].
    std::vector<std::pair<double, double>> events;
    for (std::size_t j = 0; j < jump_times.size(); ++j) {
        if (jump_times[j] > 0.0 && jump_times[j] <= horizon) {
            events.emplace_back(jump_times[j], jump_sizes[j]);
        }
    }
    std::sort(events.begin(), events.end());

    Timeline tl;
    const std::size_t cells = static_cast<std::size_t>(std::floor(horizon / grid_step));
    tl.times.reserve(cells + events.size() + 2);
    tl.jumps.reserve(cells + events.size() + 2);

    std::size_t e = 0;
    auto push = [&](double s) {
        double jump = 0.0;
        while (e < events.size() && events[e].first < s) {
            tl.times.push_back(events[e].first);
            tl.jumps.push_back(events[e].second);
            ++e;
        }
        // A jump landing exactly on a grid point attaches to it.
        while (e < events.size() && events[e].first == s) {
            jump += events[e].second;
            ++e;
        }
        tl.times.push_back(s);
        tl.jumps.push_back(jump);
    };

    push(0.0);
    for (std::size_t i = 1; i <= cells; ++i) push(static_cast<double>(i) * grid_step);
    if (tl.times.back() < horizon) push(horizon);
    return tl;
}

LimitPath assemble(const ParamTriple& p, double t, double grid_step, double horizon,
                   const std::vector<double>& kept_c, const std::vector<double>& jump_times,
                   double discarded_tail, RngStream& rng) {
    LimitPath path;
    path.grid_step = grid_step;
    path.horizon = horizon;
    path.t = t;
    path.tau = p.tau;
    path.kappa = p.kappa;
    path.discarded_tail_c3 = discarded_tail;

    Timeline tl = merge_timeline(grid_step, horizon, jump_times, kept_c);
    for (std::size_t j = 0; j < jump_times.size(); ++j) {
        if (jump_times[j] > 0.0 && jump_times[j] <= horizon) {
            path.jump_events.push_back(JumpEvent{jump_times[j], kept_c[j]});
        }
    }
    std::sort(path.jump_events.begin(), path.jump_events.end(),
              [](const JumpEvent& a, const JumpEvent& b) { return a.time < b.time; });

    double c2_total = 0.0;
    for (double cj : kept_c) c2_total += cj * cj;
    const double lin = (t - p.tau) - c2_total;
    const double sqrt_kappa = std::sqrt(p.kappa);

    const std::size_t n = tl.times.size();
    path.values.resize(n);
    path.brownian.resize(n);

    double bm = 0.0;
    double cum_jump = 0.0;
    double prev_s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double s = tl.times[i];
        if (p.kappa > 0.0 && s > prev_s) bm += std::sqrt(s - prev_s) * rng.gaussian();
        cum_jump += tl.jumps[i];
        path.brownian[i] = bm;
        path.values[i] = sqrt_kappa * bm + lin * s - 0.5 * p.kappa * s * s + cum_jump;
        prev_s = s;
    }
    path.times = std::move(tl.times);
    path.jumps = std::move(tl.jumps);
    return path;
}

}  // namespace

LimitPath simulate_levy(const ParamTriple& p, double t, double grid_step, double horizon,
                        std::uint64_t seed, std::uint64_t stream, double c_min) {
    validate(p);
    if (!(grid_step > 0.0)) throw std::invalid_argument("simulate_levy: grid_step must be positive");
    if (!(horizon > 0.0)) throw std::invalid_argument("simulate_levy: horizon must be positive");

    std::vector<double> kept;
    double discarded = 0.0;
    for (double cj : p.c) {
        if (cj >= c_min) {
            kept.push_back(cj);
        } else {
            discarded += cj * cj * cj;
        }
    }

    RngStream rng(seed, stream);
    // Jump clocks are drawn first, in rate order, so the (BM, xi) realization
    // is shared by every drift t at this (seed, stream).
    std::vector<double> jump_times(kept.size());
    for (std::size_t j = 0; j < kept.size(); ++j) jump_times[j] = rng.exponential(kept[j]);

    return assemble(p, t, grid_step, horizon, kept, jump_times, discarded, rng);
}

LimitPath build_path_with_jumps(const ParamTriple& p, double t, double grid_step, double horizon,
                                const std::vector<double>& jump_times, std::uint64_t seed,
                                std::uint64_t stream) {
    validate(p);
    if (!(grid_step > 0.0) || !(horizon > 0.0)) {
        throw std::invalid_argument("build_path_with_jumps: bad grid/horizon");
    }
    if (jump_times.size() != p.c.size()) {
        throw std::invalid_argument("build_path_with_jumps: one jump time per c entry required");
    }
    RngStream rng(seed, stream);
    return assemble(p, t, grid_step, horizon, p.c, jump_times, 0.0, rng);
}

ReflectedPath reflect(const LimitPath& p) {
    ReflectedPath rp;
    rp.times = p.times;
    rp.values = p.values;
    rp.jumps = p.jumps;
    rp.horizon = p.horizon;
    const std::size_t n = p.times.size();
    rp.running_min.resize(n);
    rp.reflected.resize(n);
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        // Pre-jump left limits count toward the minimum; upward jumps do not.
        const double pre = p.values[i] - p.jumps[i];
        m = std::min(m, pre);
        rp.running_min[i] = m;
        rp.reflected[i] = p.values[i] - m;
    }
    return rp;
}

ExcursionSet limit_excursions(const ReflectedPath& rp, double min_length) {
    if (min_length < 0.0) throw std::invalid_argument("limit_excursions: min_length < 0");
    ExcursionSet out;
    std::vector<double> lengths;

    bool open = false;
    double start = 0.0;
    double last_zero = rp.times.empty() ? 0.0 : rp.times.front();
    for (std::size_t i = 0; i < rp.times.size(); ++i) {
        const double b_pre = (rp.values[i] - rp.jumps[i]) - rp.running_min[i];
        const double b_post = rp.reflected[i];
        if (open && b_pre <= 0.0) {
            // Path returned to its past minimum: the excursion closes here.
            const double end = rp.times[i];
            if (end - start >= min_length) {
                out.intervals.emplace_back(start, end);
                lengths.push_back(end - start);
            }
            open = false;
        }
        if (!open && b_post > 0.0) {
            // b_pre == 0 means the lift happens at this very point (a record
            // followed by a jump); otherwise it happened between timeline
            // points and the last zero point anchors the interval.
            start = (b_pre <= 0.0) ? rp.times[i] : last_zero;
            open = true;
        }
        if (!open) last_zero = rp.times[i];
    }
    if (open) {
        // Open at the horizon: excluded rather than clamped.
        out.truncated_open = true;
        out.open_length = rp.horizon - start;
    }
    out.lengths = OrderedLengths::from_unsorted(std::move(lengths));
    return out;
}

bool excursion_nesting_check(const ParamTriple& p, double t1, double t2, double grid_step,
                             double horizon, std::uint64_t seed, std::uint64_t stream) {
    if (t2 < t1) throw std::invalid_argument("excursion_nesting_check: need t1 <= t2");
    const LimitPath base = simulate_levy(p, t1, grid_step, horizon, seed, stream);

    // Shared realization: the t2 path differs from the t1 path by (t2-t1)s.
    const std::size_t n = base.times.size();
    double m1 = 0.0, m2 = 0.0;
    // Zeros of the reflected path at drift t2 must be zeros at drift t1;
    // equivalently the record-minimum set shrinks as the drift grows.
    for (std::size_t i = 0; i < n; ++i) {
        const double v1 = base.values[i];
        const double v2 = base.values[i] + (t2 - t1) * base.times[i];
        const double pre1 = v1 - base.jumps[i];
        const double pre2 = v2 - base.jumps[i];
        m1 = std::min(m1, pre1);
        m2 = std::min(m2, pre2);
        const bool zero1 = (v1 - m1) <= 0.0;
        const bool zero2 = (v2 - m2) <= 0.0;
        if (zero2 && !zero1) return false;
    }
    return true;
}

}  // namespace coalsim::limit
