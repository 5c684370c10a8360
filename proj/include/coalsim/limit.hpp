#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "coalsim/core.hpp"

namespace coalsim::limit {

// Parameters (kappa, tau, c): diffusion scale, time centering, and the
// non-increasing jump-rate vector (a finite truncation; the untruncated
// object only needs sum c_j^3 < infinity). kappa = 0 additionally requires c
// outside l2, which no finite truncation can witness; the flag records the
// caller's intent and is not enforced.
struct ParamTriple {
    double kappa = 1.0;
    double tau = 0.0;
    std::vector<double> c;
    bool heavy_tail_intent = false;
};

void validate(const ParamTriple& p);

struct JumpEvent {
    double time = 0.0;  // xi_j ~ Exp(c_j)
    double size = 0.0;  // c_j
};

// Discretized realization of
//   W(s) = sqrt(kappa) BM(s) + (t - tau) s - kappa s^2/2
//        + sum_j (c_j 1{xi_j <= s} - c_j^2 s)
// on the timeline (uniform grid) U (exact jump times) U {horizon}. Values
// are exact samples of the continuous process at the timeline points: each
// cell of the merged timeline gets an independent N(0, kappa * dt) Brownian
// increment, so only excursion geometry between points is discretized.
// Two paths with the same seed and different t share (BM, xi) exactly and
// differ by (t' - t) s pointwise.
struct LimitPath {
    double grid_step = 0.0;
    double horizon = 0.0;
    double t = 0.0;
    double tau = 0.0;
    double kappa = 0.0;
    std::vector<double> times;
    std::vector<double> values;    // cadlag: jump at times[i] included
    std::vector<double> jumps;     // jump size at times[i], 0 if none
    std::vector<double> brownian;  // BM at times[i] (unscaled)
    std::vector<JumpEvent> jump_events;  // events landing inside [0, horizon]
    double discarded_tail_c3 = 0.0;      // sum c_j^3 dropped by the c_min cut
};

// Rates below c_min are dropped (their jumps vanish in the limit; the
// discarded sum c_j^3 is reported on the path).
inline constexpr double kDefaultCMin = 1e-3;

LimitPath simulate_levy(const ParamTriple& p, double t, double grid_step, double horizon,
                        std::uint64_t seed, std::uint64_t stream = 0,
                        double c_min = kDefaultCMin);

// As simulate_levy but with externally fixed jump times (hand-computable
// paths in tests and the CLI --xi hook). jump_times[j] pairs with p.c[j];
// entries past the horizon are ignored.
LimitPath build_path_with_jumps(const ParamTriple& p, double t, double grid_step, double horizon,
                                const std::vector<double>& jump_times,
                                std::uint64_t seed, std::uint64_t stream = 0);

// Horizon beyond which the parabolic (or compensator) drift dominates and
// further excursions are negligible among the largest. Defined for
// kappa > 0; kappa = 0 callers must pick the horizon explicitly.
double default_horizon(const ParamTriple& p, double t);

// B = W - running min, with the running minimum taken over the path
// including pre-jump left limits. B >= 0 everywhere and B = 0 exactly at the
// record points of the discretized path.
struct ReflectedPath {
    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> jumps;
    std::vector<double> running_min;
    std::vector<double> reflected;
    double horizon = 0.0;
};

ReflectedPath reflect(const LimitPath& p);

struct ExcursionSet {
    OrderedLengths lengths;
    std::vector<std::pair<double, double>> intervals;  // in time order
    bool truncated_open = false;  // an excursion was still open at the horizon
    double open_length = 0.0;     // its running length (excluded from `lengths`)
};

// Maximal intervals with B > 0 on the discrete timeline. Intervals shorter
// than min_length are dropped; an excursion still open at the horizon is
// excluded and reported through truncated_open/open_length.
ExcursionSet limit_excursions(const ReflectedPath& rp, double min_length = 0.0);

// True when every excursion interval at drift t1 lies inside an excursion
// interval at drift t2, evaluated on the shared (BM, xi) realization.
// Checked through the record-minimum sets: records at t2 must be a subset of
// records at t1.
bool excursion_nesting_check(const ParamTriple& p, double t1, double t2, double grid_step,
                             double horizon, std::uint64_t seed, std::uint64_t stream = 0);

}  // namespace coalsim::limit
