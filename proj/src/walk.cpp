#include "coalsim/walk.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <utility>

namespace coalsim {

JumpWalk::JumpWalk(std::vector<double> times, std::vector<double> sizes, double drift)
    : times_(std::move(times)), sizes_(std::move(sizes)), drift_(drift) {
    if (times_.size() != sizes_.size()) {
        throw std::invalid_argument("JumpWalk: times/sizes length mismatch");
    }
    for (std::size_t i = 0; i < times_.size(); ++i) {
        if (!(times_[i] > 0.0)) throw std::invalid_argument("JumpWalk: jump times must be positive");
        if (!(sizes_[i] > 0.0)) throw std::invalid_argument("JumpWalk: jump sizes must be positive");
        if (i > 0 && !(times_[i] > times_[i - 1])) {
            throw std::invalid_argument("JumpWalk: jump times must be strictly increasing");
        }
    }
    prefix_.resize(times_.size() + 1);
    prefix_[0] = 0.0;
    for (std::size_t i = 0; i < sizes_.size(); ++i) prefix_[i + 1] = prefix_[i] + sizes_[i];
}

double JumpWalk::value(double s) const {
    const auto it = std::upper_bound(times_.begin(), times_.end(), s);
    return prefix_[static_cast<std::size_t>(it - times_.begin())] + drift_ * s;
}

double JumpWalk::value_pre(double s) const {
    const auto it = std::lower_bound(times_.begin(), times_.end(), s);
    return prefix_[static_cast<std::size_t>(it - times_.begin())] + drift_ * s;
}

double JumpWalk::running_min(double s) const {
    if (drift_ >= 0.0) {
        // Nondecreasing between jumps and upward jumps: minimum is at 0.
        return std::min(0.0, value(s));
    }
    // With downward drift the infimum over [0, s] is approached at pre-jump
    // instants and at s itself.
    double m = 0.0;
    for (std::size_t i = 0; i < times_.size() && times_[i] <= s; ++i) {
        m = std::min(m, prefix_[i] + drift_ * times_[i]);
    }
    return std::min(m, value(s));
}

std::vector<WalkExcursion> excursions_above_minima(const JumpWalk& w) {
    if (!(w.drift() < 0.0)) {
        throw std::invalid_argument("excursions_above_minima: drift must be negative");
    }
    const double d = -w.drift();
    const auto& times = w.times();
    const auto& sizes = w.sizes();

    std::vector<WalkExcursion> out;
    std::size_t i = 0;
    while (i < times.size()) {
        // With no excursion open, every pre-jump instant is a running-minimum
        // record, so an excursion opens here.
        WalkExcursion e;
        e.start = times[i];
        e.first_jump = i;
        double mass = sizes[i];
        std::size_t k = i;
        // The path returns to the opening level at start + mass/d unless the
        // next jump arrives first.
        while (k + 1 < times.size() && times[k + 1] <= e.start + mass / d) {
            ++k;
            mass += sizes[k];
        }
        e.end = e.start + mass / d;
        e.last_jump = k;
        out.push_back(e);
        i = k + 1;
    }
    return out;
}

}  // namespace coalsim
