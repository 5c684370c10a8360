#include "coalsim/stats.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "coalsim/bfw.hpp"
#include "coalsim/direct_mc.hpp"
#include "coalsim/uribe.hpp"

namespace coalsim::stats {

TestReport make_report(std::string name, double statistic, double p_value,
                       std::size_t n_samples, double alpha) {
    TestReport r;
    r.name = std::move(name);
    r.statistic = statistic;
    r.p_value = p_value;
    r.n_samples = n_samples;
    r.alpha = alpha;
    r.pass = p_value > alpha;
    return r;
}

double kolmogorov_q(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Theta-function form converges fast for small arguments.
        const double t = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        double cdf = 0.0;
        for (int j = 1; j < 64; j += 2) {
            const double term = std::exp(-static_cast<double>(j) * j * t);
            cdf += term;
            if (term < 1e-18 * cdf) break;
        }
        cdf *= std::sqrt(2.0 * std::numbers::pi) / lambda;
        return std::max(0.0, 1.0 - cdf);
    }
    double q = 0.0;
    double sign = 1.0;
    for (int j = 1; j < 128; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        q += sign * term;
        if (term < 1e-18) break;
        sign = -sign;
    }
    return std::clamp(2.0 * q, 0.0, 1.0);
}

namespace {

double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 1000; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    constexpr double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

}  // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_p: bad arguments");
    if (x == 0.0) return 0.0;
    return (x < a + 1.0) ? gamma_p_series(a, x) : 1.0 - gamma_q_contfrac(a, x);
}

double gamma_q(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw std::invalid_argument("gamma_q: bad arguments");
    if (x == 0.0) return 1.0;
    return (x < a + 1.0) ? 1.0 - gamma_p_series(a, x) : gamma_q_contfrac(a, x);
}

double chi_square_sf(double statistic, double df) {
    return gamma_q(df / 2.0, statistic / 2.0);
}

double normal_cdf(double x, double mean, double sd) {
    return 0.5 * std::erfc(-(x - mean) / (sd * std::numbers::sqrt2));
}

double exponential_cdf(double x, double rate) {
    return x <= 0.0 ? 0.0 : -std::expm1(-rate * x);
}

double gumbel_cdf(double g) {
    return std::exp(-std::exp(-g));
}

namespace {

double ks_lambda(double n_eff, double d) {
    const double rn = std::sqrt(n_eff);
    return (rn + 0.12 + 0.11 / rn) * d;
}

}  // namespace

TestReport ks_two_sample(std::vector<double> a, std::vector<double> b, std::string name,
                         double alpha) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j]) {
            ++i;
        } else {
            ++j;
        }
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double n_eff = na * nb / (na + nb);
    return make_report(std::move(name), d, kolmogorov_q(ks_lambda(n_eff, d)),
                       a.size() + b.size(), alpha);
}

TestReport ks_one_sample(std::vector<double> samples, const std::function<double(double)>& cdf,
                         std::string name, double alpha) {
    if (samples.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
    std::sort(samples.begin(), samples.end());
    const double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double f = cdf(samples[i]);
        d = std::max(d, std::abs(f - static_cast<double>(i) / n));
        d = std::max(d, std::abs(f - static_cast<double>(i + 1) / n));
    }
    return make_report(std::move(name), d, kolmogorov_q(ks_lambda(n, d)), samples.size(), alpha);
}

TestReport chi_square_gof(const std::vector<double>& observed, const std::vector<double>& expected,
                          std::string name, double alpha) {
    if (observed.size() != expected.size() || observed.empty()) {
        throw std::invalid_argument("chi_square_gof: size mismatch");
    }
    double stat = 0.0;
    std::size_t used = 0;
    double total = 0.0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        total += observed[i];
        if (expected[i] <= 0.0) continue;
        const double diff = observed[i] - expected[i];
        stat += diff * diff / expected[i];
        ++used;
    }
    const double df = static_cast<double>(used - 1);
    return make_report(std::move(name), stat, chi_square_sf(stat, df),
                       static_cast<std::size_t>(total), alpha);
}

TestReport chi_square_two_sample(const std::vector<std::uint64_t>& counts_a,
                                 const std::vector<std::uint64_t>& counts_b, std::string name,
                                 double alpha) {
    if (counts_a.size() != counts_b.size() || counts_a.empty()) {
        throw std::invalid_argument("chi_square_two_sample: size mismatch");
    }
    double na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        na += static_cast<double>(counts_a[i]);
        nb += static_cast<double>(counts_b[i]);
    }
    const double ra = std::sqrt(nb / na);
    const double rb = std::sqrt(na / nb);
    double stat = 0.0;
    std::size_t used = 0;
    for (std::size_t i = 0; i < counts_a.size(); ++i) {
        const double oa = static_cast<double>(counts_a[i]);
        const double ob = static_cast<double>(counts_b[i]);
        if (oa + ob == 0.0) continue;
        const double diff = ra * oa - rb * ob;
        stat += diff * diff / (oa + ob);
        ++used;
    }
    const double df = static_cast<double>(used - 1);
    return make_report(std::move(name), stat, chi_square_sf(stat, df),
                       static_cast<std::size_t>(na + nb), alpha);
}

TestReport chi_square_independence(const std::vector<std::vector<std::uint64_t>>& table,
                                   std::string name, double alpha) {
    const std::size_t rows = table.size();
    if (rows == 0) throw std::invalid_argument("chi_square_independence: empty table");
    const std::size_t cols = table.front().size();
    std::vector<double> row_tot(rows, 0.0), col_tot(cols, 0.0);
    double total = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (table[r].size() != cols) {
            throw std::invalid_argument("chi_square_independence: ragged table");
        }
        for (std::size_t c = 0; c < cols; ++c) {
            const double v = static_cast<double>(table[r][c]);
            row_tot[r] += v;
            col_tot[c] += v;
            total += v;
        }
    }
    std::size_t rows_used = 0, cols_used = 0;
    for (double v : row_tot) rows_used += (v > 0.0);
    for (double v : col_tot) cols_used += (v > 0.0);
    double stat = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
        if (row_tot[r] == 0.0) continue;
        for (std::size_t c = 0; c < cols; ++c) {
            if (col_tot[c] == 0.0) continue;
            const double expected = row_tot[r] * col_tot[c] / total;
            const double diff = static_cast<double>(table[r][c]) - expected;
            stat += diff * diff / expected;
        }
    }
    const double df = static_cast<double>((rows_used - 1) * (cols_used - 1));
    if (df <= 0.0) {
        return make_report(std::move(name), stat, 1.0, static_cast<std::size_t>(total), alpha);
    }
    return make_report(std::move(name), stat, chi_square_sf(stat, df),
                       static_cast<std::size_t>(total), alpha);
}

MomentCheck mean_check(const std::vector<double>& samples, double target) {
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double var = 0.0;
    for (double v : samples) var += (v - mean) * (v - mean);
    var /= (n - 1.0);
    MomentCheck c;
    c.estimate = mean;
    c.target = target;
    c.std_error = std::sqrt(var / n);
    c.z = (mean - target) / c.std_error;
    c.pass = std::abs(mean - target) <= 3.0 * c.std_error;
    return c;
}

MomentCheck variance_check(const std::vector<double>& samples, double target) {
    const double n = static_cast<double>(samples.size());
    double mean = 0.0;
    for (double v : samples) mean += v;
    mean /= n;
    double m2 = 0.0, m4 = 0.0;
    for (double v : samples) {
        const double d2 = (v - mean) * (v - mean);
        m2 += d2;
        m4 += d2 * d2;
    }
    m2 /= n;
    m4 /= n;
    MomentCheck c;
    c.estimate = m2 * n / (n - 1.0);
    c.target = target;
    c.std_error = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
    c.z = (c.estimate - target) / c.std_error;
    c.pass = std::abs(c.estimate - target) <= 3.0 * c.std_error;
    return c;
}

std::vector<Partition> all_partitions(std::size_t n) {
    if (n == 0 || n > 12) throw std::invalid_argument("all_partitions: n out of range");
    std::vector<Partition> out;
    // Restricted growth strings: rgs[0] = 0, rgs[i] <= max(rgs[0..i-1]) + 1.
    std::vector<int> rgs(n, 0);
    auto emit = [&]() {
        const int k = *std::max_element(rgs.begin(), rgs.end()) + 1;
        std::vector<std::vector<int>> blocks(static_cast<std::size_t>(k));
        for (std::size_t i = 0; i < n; ++i) {
            blocks[static_cast<std::size_t>(rgs[i])].push_back(static_cast<int>(i + 1));
        }
        out.push_back(Partition::from_blocks(std::move(blocks)));
    };
    auto rec = [&](auto&& self, std::size_t i, int mx) -> void {
        if (i == n) {
            emit();
            return;
        }
        for (int v = 0; v <= mx + 1; ++v) {
            rgs[i] = v;
            self(self, i + 1, std::max(mx, v));
        }
    };
    rec(rec, 1, 0);
    return out;
}

TestReport gumbel_connectivity(std::size_t n, std::size_t samples, std::uint64_t seed,
                               double alpha) {
    if (n < 100) throw std::invalid_argument("gumbel_connectivity: need n >= 100");
    const MassVector x = MassVector::uniform(n, 1.0);
    std::vector<double> values(samples);
    for (std::size_t rep = 0; rep < samples; ++rep) {
        RngStream rng(seed, rep);
        const ClockFamily clocks = draw_clocks(x, rng);
        const double t_conn = uribe::connectivity_time(uribe::build_diagram(x, clocks));
        values[rep] = static_cast<double>(n) * t_conn - std::log(static_cast<double>(n));
    }
    return ks_one_sample(std::move(values), [](double g) { return gumbel_cdf(g); },
                         "gumbel_connectivity", alpha);
}

double giant_fraction_oracle(double c) {
    if (c <= 1.0) return 0.0;
    double rho = 0.5;
    for (int i = 0; i < 200000; ++i) {
        const double next = -std::expm1(-c * rho);
        if (std::abs(next - rho) < 1e-15) {
            rho = next;
            break;
        }
        rho = next;
    }
    return rho;
}

GiantEstimate giant_component(std::size_t n, double c, std::uint64_t seed) {
    if (n == 0 || c <= 0.0) throw std::invalid_argument("giant_component: bad arguments");
    const MassVector x = MassVector::uniform(n, 1.0 / static_cast<double>(n));
    const ClockFamily clocks = draw_clocks(x, seed);
    const auto expl = bfw::explore(bfw::build_walk(x, clocks, c * static_cast<double>(n)));
    const OrderedLengths lengths = bfw::excursion_lengths(expl);
    GiantEstimate g;
    g.c = c;
    g.n = n;
    g.subcritical_warning = (c <= 1.0);
    g.fraction = lengths.lengths.empty() ? 0.0 : lengths[0] / moments(x).sigma1;
    return g;
}

Partition sample_partition(Generator g, const MassVector& x, double q, RngStream& rng) {
    switch (g) {
        case Generator::Direct:
            return direct_mc::partition_at(direct_mc::simulate_direct(x, q, rng), q);
        case Generator::Bfw:
            return bfw::partition_at_q(x, draw_clocks(x, rng), q);
        case Generator::Uribe: {
            const ClockFamily clocks = draw_clocks(x, rng);
            return uribe::partition_at(uribe::run_coalescent(uribe::build_diagram(x, clocks)), q);
        }
    }
    throw std::logic_error("sample_partition: unknown generator");
}

std::vector<TestReport> partition_law_equality(const MassVector& x, double q,
                                               std::size_t samples, std::uint64_t seed,
                                               double alpha) {
    const std::array<Generator, 3> gens{Generator::Direct, Generator::Bfw, Generator::Uribe};
    const std::array<const char*, 3> gen_names{"direct", "bfw", "uribe"};

    std::vector<TestReport> out;
    if (x.len() <= 5) {
        const std::vector<Partition> cells = all_partitions(x.len());
        std::map<std::string, std::size_t> cell_index;
        for (std::size_t i = 0; i < cells.size(); ++i) cell_index[cells[i].key()] = i;

        std::array<std::vector<std::uint64_t>, 3> counts;
        for (auto& c : counts) c.assign(cells.size(), 0);
        for (std::size_t g = 0; g < 3; ++g) {
            for (std::size_t rep = 0; rep < samples; ++rep) {
                RngStream rng(seed, g * samples + rep);
                ++counts[g][cell_index.at(sample_partition(gens[g], x, q, rng).key())];
            }
        }
        for (std::size_t g1 = 0; g1 < 3; ++g1) {
            for (std::size_t g2 = g1 + 1; g2 < 3; ++g2) {
                out.push_back(chi_square_two_sample(
                    counts[g1], counts[g2],
                    std::string(gen_names[g1]) + "_vs_" + gen_names[g2], alpha));
            }
        }
    } else {
        std::array<std::vector<double>, 3> largest;
        for (std::size_t g = 0; g < 3; ++g) {
            largest[g].resize(samples);
            for (std::size_t rep = 0; rep < samples; ++rep) {
                RngStream rng(seed, g * samples + rep);
                const Partition p = sample_partition(gens[g], x, q, rng);
                double best = 0.0;
                for (const auto& block : p.blocks()) {
                    double mass = 0.0;
                    for (int e : block) mass += x[static_cast<std::size_t>(e - 1)];
                    best = std::max(best, mass);
                }
                largest[g][rep] = best;
            }
        }
        for (std::size_t g1 = 0; g1 < 3; ++g1) {
            for (std::size_t g2 = g1 + 1; g2 < 3; ++g2) {
                out.push_back(ks_two_sample(largest[g1], largest[g2],
                                            std::string(gen_names[g1]) + "_vs_" + gen_names[g2],
                                            alpha));
            }
        }
    }
    return out;
}

}  // namespace coalsim::stats
