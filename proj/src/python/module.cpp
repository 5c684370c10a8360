#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <sstream>
#include <utility>

#include "coalsim/bfw.hpp"
#include "coalsim/core.hpp"
#include "coalsim/direct_mc.hpp"
#include "coalsim/limit.hpp"
#include "coalsim/scaling.hpp"
#include "coalsim/stats.hpp"
#include "coalsim/suite.hpp"
#include "coalsim/uribe.hpp"

namespace py = pybind11;
using namespace coalsim;

namespace {

MassVector to_masses(const std::vector<double>& m) {
    return MassVector::from_unsorted(m);
}

ClockFamily clocks_for(const MassVector& x, std::optional<std::vector<double>> xi,
                       std::uint64_t seed, std::uint64_t stream) {
    if (xi) return clocks_from_values(*xi);
    return draw_clocks(x, seed, stream);
}

py::list partition_to_list(const Partition& p) {
    py::list out;
    for (const auto& block : p.blocks()) out.append(block);
    return out;
}

}  // namespace

PYBIND11_MODULE(_coalsim, m) {
    m.doc() = "Multiplicative-coalescent simulation toolkit: breadth-first walks, "
              "Uribe diagrams, a direct Markov-chain oracle and the limit Levy-type "
              "processes.";

    m.def(
        "moments",
        [](const std::vector<double>& masses) {
            const MomentStats s = moments(to_masses(masses));
            return py::make_tuple(s.sigma1, s.sigma2, s.sigma3);
        },
        py::arg("masses"), "(sigma1, sigma2, sigma3) of a mass vector.");

    m.def(
        "draw_clocks",
        [](const std::vector<double>& masses, std::uint64_t seed, std::uint64_t stream) {
            const MassVector x = to_masses(masses);
            const ClockFamily cf = draw_clocks(x, seed, stream);
            std::vector<std::size_t> order1;
            for (std::size_t i : cf.order) order1.push_back(i + 1);
            return py::make_tuple(cf.xi, order1);
        },
        py::arg("masses"), py::arg("seed"), py::arg("stream") = 0,
        "Exponential clocks (one per block) and the size-biased order "
        "(1-based block indices).");

    m.def(
        "bfw_partition",
        [](const std::vector<double>& masses, double q, std::optional<std::vector<double>> xi,
           std::uint64_t seed, std::uint64_t stream) {
            const MassVector x = to_masses(masses);
            return partition_to_list(bfw::partition_at_q(x, clocks_for(x, std::move(xi), seed, stream), q));
        },
        py::arg("masses"), py::arg("q"), py::arg("xi") = py::none(), py::arg("seed") = 1,
        py::arg("stream") = 0, "Coalescent partition at time q via the breadth-first walk.");

    m.def(
        "bfw_excursions",
        [](const std::vector<double>& masses, double q, std::optional<std::vector<double>> xi,
           std::uint64_t seed, std::uint64_t stream) {
            const MassVector x = to_masses(masses);
            const auto expl =
                bfw::explore(bfw::build_walk(x, clocks_for(x, std::move(xi), seed, stream), q));
            py::list out;
            for (const auto& c : expl.components) {
                py::dict d;
                d["root"] = c.root;
                d["members"] = c.members;
                d["start"] = c.start;
                d["end"] = c.end;
                d["length"] = c.mass();
                out.append(d);
            }
            return out;
        },
        py::arg("masses"), py::arg("q"), py::arg("xi") = py::none(), py::arg("seed") = 1,
        py::arg("stream") = 0, "Excursion table of the walk at time q.");

    m.def(
        "uribe_partition",
        [](const std::vector<double>& masses, double s, std::optional<std::vector<double>> xi,
           std::uint64_t seed, std::uint64_t stream) {
            const MassVector x = to_masses(masses);
            const auto uc = uribe::run_coalescent(
                uribe::build_diagram(x, clocks_for(x, std::move(xi), seed, stream)));
            return partition_to_list(uribe::partition_at(uc, s));
        },
        py::arg("masses"), py::arg("s"), py::arg("xi") = py::none(), py::arg("seed") = 1,
        py::arg("stream") = 0, "Coalescent partition at time s via the half-line diagram.");

    m.def(
        "uribe_masses",
        [](const std::vector<double>& masses, double s, std::optional<std::vector<double>> xi,
           std::uint64_t seed, std::uint64_t stream) {
            const MassVector x = to_masses(masses);
            const auto uc = uribe::run_coalescent(
                uribe::build_diagram(x, clocks_for(x, std::move(xi), seed, stream)));
            return uribe::mass_process(uc, s).lengths;
        },
        py::arg("masses"), py::arg("s"), py::arg("xi") = py::none(), py::arg("seed") = 1,
        py::arg("stream") = 0, "Ordered class masses at time s.");

    m.def(
        "simulate_direct",
        [](const std::vector<double>& masses, double horizon, std::uint64_t seed,
           std::uint64_t stream) {
            const auto traj = direct_mc::simulate_direct(to_masses(masses), horizon, seed, stream);
            py::list events;
            for (const auto& e : traj.events) {
                py::dict d;
                d["t"] = e.time;
                d["left"] = e.left;
                d["right"] = e.right;
                events.append(d);
            }
            return events;
        },
        py::arg("masses"), py::arg("horizon"), py::arg("seed") = 1, py::arg("stream") = 0,
        "Merge events of the event-driven reference simulation.");

    m.def(
        "limit_excursions",
        [](double kappa, double tau, const std::vector<double>& c, double t, double grid_step,
           double horizon, std::uint64_t seed, std::uint64_t stream, double min_length) {
            limit::ParamTriple p{kappa, tau, c, false};
            const auto exc = limit::limit_excursions(
                limit::reflect(limit::simulate_levy(p, t, grid_step, horizon, seed, stream)),
                min_length);
            py::dict d;
            d["lengths"] = exc.lengths.lengths;
            d["intervals"] = exc.intervals;
            d["truncated_open"] = exc.truncated_open;
            d["open_length"] = exc.open_length;
            return d;
        },
        py::arg("kappa"), py::arg("tau"), py::arg("c"), py::arg("t"), py::arg("grid_step"),
        py::arg("horizon"), py::arg("seed") = 1, py::arg("stream") = 0,
        py::arg("min_length") = 0.0,
        "Ordered excursion lengths of the reflected limit process.");

    m.def(
        "ks_two_sample",
        [](std::vector<double> a, std::vector<double> b) {
            const auto r = stats::ks_two_sample(std::move(a), std::move(b));
            return py::make_tuple(r.statistic, r.p_value);
        },
        py::arg("a"), py::arg("b"), "(statistic, p_value) of the two-sample KS test.");

    m.def(
        "giant_component",
        [](std::size_t n, double c, std::uint64_t seed) {
            const auto g = stats::giant_component(n, c, seed);
            return py::make_tuple(g.fraction, g.subcritical_warning);
        },
        py::arg("n"), py::arg("c"), py::arg("seed") = 1,
        "(largest excursion fraction, subcritical warning) at q = c*n.");

    m.def("giant_fraction_oracle", &stats::giant_fraction_oracle, py::arg("c"),
          "Fixed point of rho = 1 - exp(-c*rho).");

    m.def(
        "run_acceptance_suite",
        [](std::uint64_t seed) {
            std::ostringstream progress;
            const auto res = suite::run_all(seed, &progress);
            py::list rows;
            for (const auto& c : res.criteria) {
                py::dict d;
                d["id"] = c.id;
                d["name"] = c.name;
                d["pass"] = c.pass;
                d["detail"] = c.detail;
                d["seconds"] = c.seconds;
                rows.append(d);
            }
            py::dict out;
            out["seed"] = res.seed;
            out["all_pass"] = res.all_pass;
            out["criteria"] = rows;
            out["log"] = progress.str();
            return out;
        },
        py::arg("seed") = 1, "Full acceptance battery; heavy (minutes).");
}
