#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "coalsim/core.hpp"

namespace coalsim::stats {

struct TestReport {
    std::string name;
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n_samples = 0;
    double alpha = 0.001;
    bool pass = false;
};

TestReport make_report(std::string name, double statistic, double p_value,
                       std::size_t n_samples, double alpha);

// Survival function of the Kolmogorov distribution, Q(lambda) = P(K > lambda).
double kolmogorov_q(double lambda);

// Regularized incomplete gamma functions (series / continued-fraction split).
double gamma_p(double a, double x);
double gamma_q(double a, double x);

// Upper tail of the chi-square distribution with df degrees of freedom.
double chi_square_sf(double statistic, double df);

double normal_cdf(double x, double mean = 0.0, double sd = 1.0);
double exponential_cdf(double x, double rate);
double gumbel_cdf(double g);

// Two-sample Kolmogorov-Smirnov with the asymptotic p-value.
TestReport ks_two_sample(std::vector<double> a, std::vector<double> b,
                         std::string name = "ks_two_sample", double alpha = 0.001);

// One-sample Kolmogorov-Smirnov against a continuous CDF.
TestReport ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf,
                         std::string name = "ks_one_sample", double alpha = 0.001);

// Goodness of fit of observed counts against expected counts (same totals).
TestReport chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                          std::string name = "chi_square_gof", double alpha = 0.001);

// Homogeneity of two multinomial count vectors over shared cells. Cells
// empty in both samples are dropped from the degrees of freedom.
TestReport chi_square_two_sample(const std::vector<std::uint64_t>& counts_a,
                                 const std::vector<std::uint64_t>& counts_b,
                                 std::string name = "chi_square_two_sample", double alpha = 0.001);

// Independence test on an r x c contingency table.
TestReport chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table,
                                   std::string name = "chi_square_independence",
                                   double alpha = 0.001);

// Monte Carlo moment check: estimate vs target with its standard error.
struct MomentCheck {
    double estimate = 0.0;
    double target = 0.0;
    double std_error = 0.0;
    double z = 0.0;
    bool pass = false;  // |estimate - target| <= 3 * std_error
};

MomentCheck mean_check(const std::vector<double>& samples, double target);
// Standard error of the variance estimator via the sample fourth moment.
MomentCheck variance_check(const std::vector<double>& samples, double target);

// All set partitions of {1..n} in a stable enumeration order (n <= 12).
std::vector<Partition> all_partitions(std::size_t n);

// --- named distributional checks ---------------------------------------

// Connectivity time of n equal unit masses: n*T_conn - log n against the
// Gumbel law exp(-exp(-g)) by one-sample KS. Requires n >= 100.
TestReport gumbel_connectivity(std::size_t n, std::size_t samples, std::uint64_t seed,
                               double alpha = 0.001);

struct GiantEstimate {
    double fraction = 0.0;        // largest excursion length / sigma1
    double c = 0.0;
    std::size_t n = 0;
    bool subcritical_warning = false;  // emitted when c <= 1
};

// Largest breadth-first-walk excursion for n blocks of mass 1/n at q = c*n,
// as a fraction of the total mass.
GiantEstimate giant_component(std::size_t n, double c, std::uint64_t seed);

// Fixed point of rho = 1 - exp(-c*rho) on (0, 1], the supercritical giant
// fraction. Returns 0 for c <= 1.
double giant_fraction_oracle(double c);

enum class Generator { Direct, Bfw, Uribe };

// Draws one coalescent partition at time q through the requested pipeline.
Partition sample_partition(Generator g, const MassVector& x, double q, RngStream& rng);

// Pairwise equality-in-law tests across the three generators: chi-square
// over the full partition lattice for n <= 5, otherwise two-sample KS on the
// largest block mass. Returns the three pairwise reports.
std::vector<TestReport> partition_law_equality(const MassVector& x, double q,
                                               std::size_t samples, std::uint64_t seed,
                                               double alpha = 0.001);

}  // namespace coalsim::stats
