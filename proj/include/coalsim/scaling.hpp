#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coalsim/core.hpp"
#include "coalsim/stats.hpp"
#include "coalsim/walk.hpp"

namespace coalsim::scaling {

// Family of finite initial states x^(n) with its scaling target (kappa, c)
// and time centering tau.
struct ScalingSequence {
    std::string name;
    std::function<MassVector(std::size_t)> make;
    double kappa = 1.0;
    std::vector<double> c;
    double tau = 0.0;
};

// n blocks of mass n^{-2/3}; target (kappa, c) = (1, 0).
ScalingSequence standard_sequence();

// Standard blocks plus distinguished blocks c_j * n^{-1/3} in front; target
// (1, c).
ScalingSequence dust_sequence(std::vector<double> c);

struct HypothesisRow {
    std::size_t n = 0;
    double moment_residual = 0.0;  // |sigma3/sigma2^3 - (kappa + sum c_j^3)|
    double block_residual = 0.0;   // max_j |x_j/sigma2 - c_j| over leading blocks
    double sigma2 = 0.0;
};

struct HypothesisReport {
    std::vector<HypothesisRow> rows;
    double tolerance = 0.0;
    bool pass = false;  // residuals decrease along n and the last row is below tolerance
};

HypothesisReport check_hypotheses(const ScalingSequence& seq, const std::vector<std::size_t>& ns,
                                  double tolerance);

// The three residual sums controlling the split index m.
struct SplitResiduals {
    double ratio_sq = 0.0;    // |sum_{i<=m} (x_i/sigma2)^2 - sum_{i<=m} c_i^2|
    double cube = 0.0;        // |sum_{i<=m} (x_i/sigma2 - c_i)^3|
    double damp = 0.0;        // sigma2 * sum_{i<=m} c_i^2
    double max_abs() const;
};

SplitResiduals split_residuals(const MassVector& xn, const std::vector<double>& c, std::size_t m);

// Largest m <= floor(n^{1/4}) whose three residuals are all below the
// tolerance. m = 0 (empty sums) always qualifies.
std::size_t choose_m(const MassVector& xn, const std::vector<double>& c, double tolerance);

// Z_n scaled by 1/sigma2 at q = t - tau + 1/sigma2, split into the
// distinguished-block part R and the remainder Y over disjoint clock
// subsets, so zbar(s) = ybar(s) + rbar(s) pointwise and ybar, rbar are
// independent.
struct ScaledWalk {
    std::size_t n = 0;
    std::size_t m = 0;
    double q = 0.0;
    double sigma2 = 0.0;
    double t = 0.0;
    double tau = 0.0;
    JumpWalk zbar;
    JumpWalk ybar;
    JumpWalk rbar;
};

ScaledWalk scaled_walk(const MassVector& xn, const ClockFamily& clocks, double t, double tau,
                       std::size_t m);

struct FunctionalReport {
    std::string functional;
    stats::TestReport ks;
};

struct ConvergenceReport {
    std::size_t n = 0;
    double t = 0.0;
    std::size_t seeds = 0;
    double grid_step = 0.0;
    std::vector<FunctionalReport> functionals;
    bool pass = false;
};

// Two-sample KS between functionals of zbar_n (value at s = 1, running min
// at s = 1, largest excursion length) and the same functionals of the
// simulated limit process.
ConvergenceReport convergence_test(const ScalingSequence& seq, double t, std::size_t n,
                                   std::size_t seeds, double grid_step, std::uint64_t seed);

}  // namespace coalsim::scaling
