#include "coalsim/suite.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <limits>
#include <mutex>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include "coalsim/bfw.hpp"
#include "coalsim/core.hpp"
#include "coalsim/direct_mc.hpp"
#include "coalsim/limit.hpp"
#include "coalsim/parallel.hpp"
#include "coalsim/scaling.hpp"
#include "coalsim/stats.hpp"
#include "coalsim/uribe.hpp"

namespace coalsim::suite {

namespace {

// Criterion 7 audits mass conservation on every bfw/uribe run performed by
// criteria 1-6.
class MassAudit {
public:
    void add(double total, double sigma1) {
        const double rel = std::abs(total - sigma1) / sigma1;
        std::lock_guard<std::mutex> lock(mu_);
        ++runs_;
        max_rel_ = std::max(max_rel_, rel);
    }
    std::uint64_t runs() const { return runs_; }
    double max_rel() const { return max_rel_; }

private:
    mutable std::mutex mu_;
    std::uint64_t runs_ = 0;
    double max_rel_ = 0.0;
};

MassAudit& audit() {
    static MassAudit a;
    return a;
}

double partition_mass(const Partition& p, const MassVector& x) {
    double total = 0.0;
    for (const auto& block : p.blocks()) {
        for (int e : block) total += x[static_cast<std::size_t>(e - 1)];
    }
    return total;
}

std::string fmt(double v, int prec = 6) {
    std::ostringstream os;
    os << std::setprecision(prec) << v;
    return os.str();
}

MassVector golden_masses() {
    return MassVector(std::vector<double>{1.1, 0.8, 0.5, 0.4, 0.4, 0.3, 0.2});
}

ClockFamily golden_clocks() {
    return clocks_from_values(std::vector<double>{6.0, 0.2, 1.4, 0.7, 5.6, 4.6, 3.4});
}

MassVector random_masses(RngStream& rng, std::size_t max_n) {
    const std::size_t n = 2 + static_cast<std::size_t>(rng.next_u64() % (max_n - 1));
    std::vector<double> m(n);
    for (auto& v : m) v = 0.1 + 1.4 * rng.uniform01();
    return MassVector::from_unsorted(std::move(m));
}

bool close_rel(double a, double b, double tol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

// --- criterion bodies ----------------------------------------------------

CriterionResult golden_coupling(std::uint64_t) {
    CriterionResult r{1, "golden_coupling", false, "", 0.0};
    const MassVector x = golden_masses();
    const ClockFamily clocks = golden_clocks();
    const Partition expected = Partition::from_blocks({{2, 3, 4, 7}, {1, 5}, {6}});
    const std::vector<double> expected_lengths{1.9, 1.5, 0.3};

    auto run_once = [&]() {
        const auto expl = bfw::explore(bfw::build_walk(x, clocks, 2.0));
        const Partition p_bfw = bfw::partition_at_q(x, clocks, 2.0);
        const OrderedLengths l_bfw = bfw::excursion_lengths(expl);
        const auto uc = uribe::run_coalescent(uribe::build_diagram(x, clocks));
        const Partition p_uribe = uribe::partition_at(uc, 2.0);
        const OrderedLengths l_uribe = uribe::mass_process(uc, 2.0);
        return std::make_tuple(p_bfw, l_bfw, p_uribe, l_uribe);
    };
    run_once();  // warm caches before timing
    const auto start = std::chrono::steady_clock::now();
    const auto [p_bfw, l_bfw, p_uribe, l_uribe] = run_once();
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    const double sigma1 = moments(x).sigma1;
    audit().add(l_bfw.total(), sigma1);
    audit().add(l_uribe.total(), sigma1);

    bool ok = (p_bfw == expected) && (p_uribe == expected) && l_bfw.size() == 3 &&
              l_uribe.size() == 3;
    for (std::size_t i = 0; ok && i < 3; ++i) {
        ok = std::abs(l_bfw[i] - expected_lengths[i]) <= 1e-9 &&
             std::abs(l_uribe[i] - expected_lengths[i]) <= 1e-9;
    }
    ok = ok && elapsed < 1e-3;
    r.pass = ok;
    r.detail = "partition=" + p_bfw.key() + " lengths=(" + fmt(l_bfw[0]) + "," + fmt(l_bfw[1]) +
               "," + fmt(l_bfw[2]) + ") runtime=" + fmt(elapsed * 1e3, 3) + "ms";
    return r;
}

CriterionResult exact_coupling(std::uint64_t seed) {
    CriterionResult r{2, "bfw_uribe_exact_coupling", false, "", 0.0};
    constexpr std::size_t kInstances = 10000;
    std::atomic<std::size_t> failures{0};
    parallel_for(kInstances, [&](std::size_t inst) {
        RngStream rng(seed, 1000 + inst);
        const MassVector x = random_masses(rng, 50);
        const ClockFamily clocks = draw_clocks(x, rng);
        const auto ev_bfw = bfw::merge_events(x, clocks);
        const auto ev_uribe = uribe::merge_events(uribe::run_coalescent(uribe::build_diagram(x, clocks)));
        if (ev_bfw.size() != ev_uribe.size() || ev_bfw.size() != x.len() - 1) {
            ++failures;
            return;
        }
        auto a = ev_bfw;
        auto b = ev_uribe;
        std::sort(a.begin(), a.end(),
                  [](const auto& p, const auto& q) { return p.absorbed_leader_pos < q.absorbed_leader_pos; });
        std::sort(b.begin(), b.end(),
                  [](const auto& p, const auto& q) { return p.absorbed_line < q.absorbed_line; });
        for (std::size_t i = 0; i < a.size(); ++i) {
            if (a[i].absorbed_leader_pos != b[i].absorbed_line ||
                !close_rel(a[i].time, b[i].time, 1e-9) || a[i].absorber != b[i].absorber ||
                a[i].absorbed != b[i].absorbed) {
                ++failures;
                return;
            }
        }
    });
    r.pass = failures.load() == 0;
    r.detail = "instances=10000 mismatches=" + std::to_string(failures.load());
    return r;
}

CriterionResult n2_closed_form(std::uint64_t seed) {
    CriterionResult r{3, "n2_survival_closed_form", false, "", 0.0};
    const std::vector<std::pair<double, double>> cases{{1.0, 1.0}, {2.0, 0.5}, {3.0, 1.0}};
    constexpr std::size_t kSamples = 100000;
    bool all_pass = true;
    std::ostringstream detail;
    std::uint64_t stream_base = 0;
    for (const auto& [x1, x2] : cases) {
        const MassVector x(std::vector<double>{x1, x2});
        const double rate = x1 * x2;
        for (int gen = 0; gen < 3; ++gen) {
            std::vector<double> times = parallel_samples(kSamples, [&](std::size_t rep) {
                RngStream rng(seed, stream_base + rep);
                switch (gen) {
                    case 0:
                        return direct_mc::simulate_direct(
                                   x, std::numeric_limits<double>::infinity(), rng)
                            .events.front()
                            .time;
                    case 1:
                        return bfw::merge_events(x, draw_clocks(x, rng)).front().time;
                    default:
                        return uribe::build_diagram(x, draw_clocks(x, rng)).stop_times[1];
                }
            });
            stream_base += kSamples;
            const auto rep = stats::ks_one_sample(
                std::move(times), [rate](double s) { return stats::exponential_cdf(s, rate); });
            all_pass = all_pass && rep.pass;
            detail << "(" << x1 << "," << x2 << ")g" << gen << ":p=" << fmt(rep.p_value, 3) << " ";
        }
    }
    r.pass = all_pass;
    r.detail = detail.str();
    return r;
}

CriterionResult three_way_law(std::uint64_t seed) {
    CriterionResult r{4, "three_way_partition_law", false, "", 0.0};
    const MassVector x(std::vector<double>{1.0, 0.5, 0.5, 0.25});
    constexpr std::size_t kSamples = 100000;
    bool all_pass = true;
    std::ostringstream detail;
    int qi = 0;
    for (double q : {0.5, 1.0, 2.0}) {
        const auto reports =
            stats::partition_law_equality(x, q, kSamples, seed + 17 * static_cast<std::uint64_t>(++qi));
        for (const auto& rep : reports) {
            all_pass = all_pass && rep.pass;
            detail << "q=" << q << ":" << rep.name << ":p=" << fmt(rep.p_value, 3) << " ";
        }
        // Mass audit over a spot-check batch from each pipeline.
        for (int g = 1; g <= 2; ++g) {
            RngStream rng(seed, 900000 + static_cast<std::uint64_t>(qi * 10 + g));
            const Partition p = stats::sample_partition(
                g == 1 ? stats::Generator::Bfw : stats::Generator::Uribe, x, q, rng);
            audit().add(partition_mass(p, x), moments(x).sigma1);
        }
    }
    r.pass = all_pass;
    r.detail = detail.str();
    return r;
}

CriterionResult s_pi_independence(std::uint64_t seed) {
    CriterionResult r{5, "S_independent_of_pi", false, "", 0.0};
    const MassVector x(std::vector<double>{2.0, 1.0, 1.0});
    const auto rep = uribe::check_S_pi_independence(x, 100000, seed);
    r.pass = rep.pass;
    r.detail = "chi2_p=" + fmt(rep.independence.p_value, 3) +
               " ks_exp5_p=" + fmt(rep.s_marginal.p_value, 3) + " rate=" + fmt(rep.rate, 3);
    return r;
}

CriterionResult bfw_nesting(std::uint64_t seed) {
    CriterionResult r{6, "bfw_partition_nesting", false, "", 0.0};
    constexpr std::size_t kInstances = 1000;
    std::atomic<std::size_t> failures{0};
    parallel_for(kInstances, [&](std::size_t inst) {
        RngStream rng(seed, 40000 + inst);
        const MassVector x = random_masses(rng, 50);
        const ClockFamily clocks = draw_clocks(x, rng);
        const double q1 = 0.05 + 2.0 * rng.uniform01();
        const double q2 = q1 + 0.05 + 2.0 * rng.uniform01();
        const Partition p1 = bfw::partition_at_q(x, clocks, q1);
        const Partition p2 = bfw::partition_at_q(x, clocks, q2);
        const double sigma1 = moments(x).sigma1;
        audit().add(partition_mass(p1, x), sigma1);
        audit().add(partition_mass(p2, x), sigma1);
        if (!p1.refines(p2)) ++failures;
    });
    r.pass = failures.load() == 0;
    r.detail = "instances=1000 refinement_failures=" + std::to_string(failures.load());
    return r;
}

CriterionResult mass_conservation(std::uint64_t) {
    CriterionResult r{7, "mass_conservation", false, "", 0.0};
    r.pass = audit().runs() > 0 && audit().max_rel() <= 1e-9;
    r.detail = "audited_runs=" + std::to_string(audit().runs()) +
               " max_rel_err=" + fmt(audit().max_rel(), 3);
    return r;
}

CriterionResult gumbel(std::uint64_t seed) {
    CriterionResult r{8, "gumbel_connectivity", false, "", 0.0};
    const auto rep = stats::gumbel_connectivity(1000, 10000, seed);
    r.pass = rep.pass;
    r.detail = "ks_stat=" + fmt(rep.statistic, 4) + " p=" + fmt(rep.p_value, 4);
    return r;
}

CriterionResult giant(std::uint64_t seed) {
    CriterionResult r{9, "giant_component", false, "", 0.0};
    bool ok = true;
    std::ostringstream detail;
    for (double c : {2.0, 1.2}) {
        const auto est = stats::giant_component(100000, c, seed);
        const double target = stats::giant_fraction_oracle(c);
        ok = ok && std::abs(est.fraction - target) <= 0.02;
        detail << "c=" << c << ":frac=" << fmt(est.fraction, 5) << " target=" << fmt(target, 5)
               << " ";
    }
    r.pass = ok;
    r.detail = detail.str();
    return r;
}

CriterionResult scaled_walk_moments(std::uint64_t seed) {
    CriterionResult r{10, "scaled_walk_drift_variance", false, "", 0.0};
    constexpr std::size_t kSeeds = 10000;
    constexpr std::size_t kN = 10000;
    const auto seq = scaling::standard_sequence();
    const MassVector xn = seq.make(kN);
    const std::vector<double> s_values{0.5, 1.0, 2.0};

    std::vector<std::vector<double>> samples(s_values.size(), std::vector<double>(kSeeds));
    parallel_for(kSeeds, [&](std::size_t rep) {
        RngStream rng(seed, 50000 + rep);
        const ClockFamily clocks = draw_clocks(xn, rng);
        const scaling::ScaledWalk w = scaling::scaled_walk(xn, clocks, 0.0, 0.0, 0);
        for (std::size_t si = 0; si < s_values.size(); ++si) {
            samples[si][rep] = w.zbar.value(s_values[si]);
        }
    });

    bool ok = true;
    std::ostringstream detail;
    for (std::size_t si = 0; si < s_values.size(); ++si) {
        const double s = s_values[si];
        const auto mc = stats::mean_check(samples[si], -s * s / 2.0);
        const auto vc = stats::variance_check(samples[si], s);
        ok = ok && mc.pass && vc.pass;
        detail << "s=" << s << ":mean_z=" << fmt(mc.z, 2) << (mc.pass ? "" : "(FAIL)")
               << ",var_z=" << fmt(vc.z, 2) << (vc.pass ? "" : "(FAIL)") << " ";
    }
    r.pass = ok;
    r.detail = detail.str();
    return r;
}

CriterionResult marginal_convergence(std::uint64_t seed) {
    CriterionResult r{11, "marginal_gaussian_convergence", false, "", 0.0};
    constexpr std::size_t kSeeds = 10000;
    constexpr std::size_t kN = 10000;
    const auto seq = scaling::standard_sequence();
    const MassVector xn = seq.make(kN);
    std::vector<double> samples = parallel_samples(kSeeds, [&](std::size_t rep) {
        RngStream rng(seed, 70000 + rep);
        const ClockFamily clocks = draw_clocks(xn, rng);
        return scaling::scaled_walk(xn, clocks, 0.0, 0.0, 0).zbar.value(1.0);
    });
    const auto rep = stats::ks_one_sample(
        std::move(samples), [](double v) { return stats::normal_cdf(v, -0.5, 1.0); });
    r.pass = rep.pass;
    r.detail = "ks_stat=" + fmt(rep.statistic, 4) + " p=" + fmt(rep.p_value, 4);
    return r;
}

CriterionResult limit_nesting(std::uint64_t seed) {
    CriterionResult r{12, "limit_excursion_nesting", false, "", 0.0};
    struct Case {
        double kappa;
        std::vector<double> c;
    };
    const std::vector<Case> cases{
        {0.0, {1.0}}, {0.0, {1.0, 0.5}}, {1.0, {}}, {1.0, {1.0}}, {1.0, {1.0, 0.5}}};
    constexpr std::size_t kSeeds = 100;
    bool ok = true;
    std::ostringstream detail;
    for (const auto& cs : cases) {
        limit::ParamTriple p{cs.kappa, 0.0, cs.c, cs.kappa == 0.0};
        // kappa = 0 has no module default; a fixed window is configured.
        const double horizon = cs.kappa > 0.0 ? limit::default_horizon(p, 1.0) : 6.0;
        std::atomic<std::size_t> failures{0};
        parallel_for(kSeeds, [&](std::size_t rep) {
            if (!limit::excursion_nesting_check(p, 0.0, 1.0, 1e-4, horizon, seed, 80000 + rep)) {
                ++failures;
            }
        });
        ok = ok && failures.load() == 0;
        detail << "kappa=" << cs.kappa << ",|c|=" << cs.c.size()
               << ":fail=" << failures.load() << " ";
    }
    r.pass = ok;
    r.detail = detail.str();
    return r;
}

CriterionResult finite_vs_limit(std::uint64_t seed) {
    CriterionResult r{13, "finite_vs_limit_excursion_law", false, "", 0.0};
    constexpr std::size_t kSamples = 10000;
    constexpr std::size_t kN = 10000;
    const MassVector xn = scaling::standard_sequence().make(kN);
    const double q = 1.0 / moments(xn).sigma2;  // t = 0

    std::vector<double> walk_largest = parallel_samples(kSamples, [&](std::size_t rep) {
        RngStream rng(seed, 100000 + rep);
        const ClockFamily clocks = draw_clocks(xn, rng);
        const auto lengths = bfw::excursion_lengths(bfw::explore(bfw::build_walk(xn, clocks, q)));
        return lengths.lengths.empty() ? 0.0 : lengths[0];
    });

    limit::ParamTriple p{1.0, 0.0, {}, false};
    const double horizon = limit::default_horizon(p, 0.0);
    std::vector<double> limit_largest = parallel_samples(kSamples, [&](std::size_t rep) {
        const auto path = limit::simulate_levy(p, 0.0, 1e-4, horizon, seed, 200000 + rep);
        const auto exc = limit::limit_excursions(limit::reflect(path));
        return exc.lengths.lengths.empty() ? 0.0 : exc.lengths[0];
    });

    const auto rep = stats::ks_two_sample(std::move(walk_largest), std::move(limit_largest));
    r.pass = rep.pass;
    r.detail = "ks_stat=" + fmt(rep.statistic, 4) + " p=" + fmt(rep.p_value, 4) +
               " grid=1e-4 horizon=" + fmt(horizon, 3);
    return r;
}

CriterionResult simultcon_identity(std::uint64_t seed) {
    CriterionResult r{14, "time_change_identity", false, "", 0.0};
    constexpr std::size_t kInstances = 100;
    std::atomic<std::size_t> failures{0};
    parallel_for(kInstances, [&](std::size_t inst) {
        RngStream rng(seed, 300000 + inst);
        const MassVector x = random_masses(rng, 40);
        const ClockFamily clocks = draw_clocks(x, rng);
        const double sigma2 = moments(x).sigma2;
        const double t = -0.04 + 0.08 * rng.uniform01();
        const double z = t + 0.08 * rng.uniform01();
        if (std::min(t, z) + 1.0 / sigma2 <= 0.0) return;

        const auto wt = scaling::scaled_walk(x, clocks, t, 0.0, 0);
        const auto wz = scaling::scaled_walk(x, clocks, z, 0.0, 0);
        const double ratio = wt.q / wz.q;

        // Evaluate at inter-jump midpoints; the time change maps jumps to
        // jumps only up to rounding, so jump instants themselves are not
        // comparison points.
        const auto& jt = wt.zbar.times();
        std::vector<double> probes;
        probes.push_back(jt.empty() ? 1.0 : jt.front() / 2.0);
        for (std::size_t i = 0; i + 1 < jt.size(); ++i) {
            probes.push_back((jt[i] + jt[i + 1]) / 2.0);
        }
        if (!jt.empty()) probes.push_back(jt.back() + 1.0);

        for (double s : probes) {
            const double lhs = wz.zbar.value(s * ratio);
            const double rhs = wt.zbar.value(s) + s * (1.0 - ratio) / sigma2;
            if (!close_rel(lhs, rhs, 1e-9)) {
                ++failures;
                return;
            }
        }
    });
    r.pass = failures.load() == 0;
    r.detail = "instances=100 failures=" + std::to_string(failures.load());
    return r;
}

using CriterionFn = CriterionResult (*)(std::uint64_t);

constexpr CriterionFn kCriteria[] = {
    golden_coupling,    exact_coupling, n2_closed_form,      three_way_law,
    s_pi_independence,  bfw_nesting,    mass_conservation,   gumbel,
    giant,              scaled_walk_moments, marginal_convergence, limit_nesting,
    finite_vs_limit,    simultcon_identity,
};

}  // namespace

int criterion_count() {
    return static_cast<int>(std::size(kCriteria));
}

CriterionResult run_criterion(int id, std::uint64_t seed) {
    if (id < 1 || id > criterion_count()) {
        throw std::invalid_argument("run_criterion: id out of range");
    }
    const auto start = std::chrono::steady_clock::now();
    CriterionResult r = kCriteria[id - 1](seed);
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return r;
}

SuiteResult run_all(std::uint64_t seed, std::ostream* progress) {
    SuiteResult result;
    result.seed = seed;
    result.all_pass = true;
    for (int id = 1; id <= criterion_count(); ++id) {
        CriterionResult r = run_criterion(id, seed);
        result.all_pass = result.all_pass && r.pass;
        if (progress) {
            (*progress) << "criterion " << std::setw(2) << r.id << " [" << r.name << "] "
                        << (r.pass ? "PASS" : "FAIL") << " (" << std::fixed
                        << std::setprecision(2) << r.seconds << "s) " << r.detail << std::endl;
            progress->unsetf(std::ios::fixed);
        }
        result.criteria.push_back(std::move(r));
    }
    return result;
}

}  // namespace coalsim::suite
