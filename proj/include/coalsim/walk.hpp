#pragma once

#include <cstddef>
#include <vector>

namespace coalsim {

// Piecewise-linear path with positive jumps, stored symbolically:
//   P(s) = sum_{times[i] <= s} sizes[i] + drift * s.
// Jump times are strictly increasing and positive; the path is cadlag (the
// jump at times[i] is included in the value at s = times[i]).
class JumpWalk {
public:
    JumpWalk() = default;
    JumpWalk(std::vector<double> times, std::vector<double> sizes, double drift);

    const std::vector<double>& times() const noexcept { return times_; }
    const std::vector<double>& sizes() const noexcept { return sizes_; }
    double drift() const noexcept { return drift_; }
    std::size_t jump_count() const noexcept { return times_.size(); }

    double value(double s) const;       // cadlag value
    double value_pre(double s) const;   // left limit
    // min over [0, s] of the path (left limits included).
    double running_min(double s) const;

    // Cumulative jump mass strictly before jump index i.
    double prefix(std::size_t i) const noexcept { return prefix_[i]; }

private:
    std::vector<double> times_;
    std::vector<double> sizes_;
    std::vector<double> prefix_;  // prefix_[i] = sum of sizes_[0..i-1]
    double drift_ = -1.0;
};

struct WalkExcursion {
    double start = 0.0;   // jump time opening the excursion
    double end = 0.0;     // first return to the opening level
    std::size_t first_jump = 0;  // index of the opening jump
    std::size_t last_jump = 0;   // index of the last jump inside
    double length() const noexcept { return end - start; }
};

// Maximal intervals on which the path stays strictly above its past minimum.
// Requires drift < 0. Each excursion opens at a jump whose pre-jump value is
// the running minimum and closes when the path drifts back to that level, so
// end - start = (mass of contained jumps) / |drift| exactly.
std::vector<WalkExcursion> excursions_above_minima(const JumpWalk& w);

}  // namespace coalsim
