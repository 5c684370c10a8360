#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "coalsim/bfw.hpp"
#include "coalsim/core.hpp"
#include "coalsim/direct_mc.hpp"
#include "coalsim/limit.hpp"
#include "coalsim/parallel.hpp"
#include "coalsim/scaling.hpp"
#include "coalsim/stats.hpp"
#include "coalsim/suite.hpp"
#include "coalsim/uribe.hpp"

using json = nlohmann::json;
using namespace coalsim;

namespace {

constexpr int kSchemaVersion = 1;

std::vector<double> parse_doubles(const std::string& csv) {
    std::vector<double> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (item.empty()) continue;
        out.push_back(std::stod(item));
    }
    return out;
}

MassVector load_masses(const std::string& inline_list, const std::string& file) {
    if (!inline_list.empty()) return MassVector::from_unsorted(parse_doubles(inline_list));
    if (!file.empty()) {
        std::ifstream in(file);
        if (!in) throw CLI::ValidationError("--masses-file", "cannot open " + file);
        std::stringstream buf;
        buf << in.rdbuf();
        std::string text = buf.str();
        // Accept either a JSON array or comma/whitespace separated numbers.
        if (text.find('[') != std::string::npos) {
            return MassVector::from_unsorted(json::parse(text).get<std::vector<double>>());
        }
        for (char& ch : text) {
            if (ch == '\n' || ch == ' ' || ch == '\t') ch = ',';
        }
        return MassVector::from_unsorted(parse_doubles(text));
    }
    throw CLI::ValidationError("--masses", "mass vector required (inline or file)");
}

ClockFamily clocks_for(const MassVector& x, const std::vector<double>& xi, std::uint64_t seed,
                       std::uint64_t stream) {
    if (!xi.empty()) return clocks_from_values(xi);
    return draw_clocks(x, seed, stream);
}

void emit(const std::string& text, const std::string& path, bool force) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    if (std::filesystem::exists(path) && !force) {
        throw CLI::ValidationError("--output", path + " exists; pass --force to overwrite");
    }
    std::ofstream out(path);
    out << text;
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

json partition_json(const Partition& p) {
    json arr = json::array();
    for (const auto& block : p.blocks()) arr.push_back(block);
    return arr;
}

std::string partition_text(const Partition& p) {
    std::string out = "{";
    for (std::size_t b = 0; b < p.blocks().size(); ++b) {
        if (b) out += ",";
        out += "{";
        for (std::size_t i = 0; i < p.blocks()[b].size(); ++i) {
            if (i) out += ",";
            out += std::to_string(p.blocks()[b][i]);
        }
        out += "}";
    }
    return out + "}";
}

json report_json(const stats::TestReport& r) {
    return json{{"name", r.name},       {"statistic", r.statistic}, {"p_value", r.p_value},
                {"n_samples", r.n_samples}, {"alpha", r.alpha},     {"pass", r.pass}};
}

std::uint64_t default_seed_from_env() {
    if (const char* env = std::getenv("COALSIM_SEED")) {
        return std::strtoull(env, nullptr, 10);
    }
    return 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "coalsim: multiplicative-coalescent simulation and cross-verification\n"
        "Constructions: event-driven oracle (direct), breadth-first walks (bfw),\n"
        "half-line diagrams (uribe) and the limit Levy-type processes (limit)."};
    app.require_subcommand(1);

    unsigned threads = 0;
    app.add_option("--threads", threads, "Replication threads (0 = all cores)");

    std::uint64_t seed = default_seed_from_env();
    app.add_option("--seed", seed, "Root seed (env COALSIM_SEED overrides the default)");

    std::string output;
    bool force = false;
    app.add_option("--output", output, "Write to this file instead of stdout");
    app.add_flag("--force", force, "Allow overwriting --output");

    std::string masses_arg, masses_file, xi_arg, format = "text";

    auto add_mass_opts = [&](CLI::App* sub) {
        sub->add_option("--masses", masses_arg, "Comma-separated block masses");
        sub->add_option("--masses-file", masses_file, "File with masses (JSON array or numbers)");
    };

    // direct
    auto* sub_direct = app.add_subcommand("direct", "Event-driven reference simulation");
    double horizon = 1.0;
    add_mass_opts(sub_direct);
    sub_direct->add_option("--horizon", horizon, "Simulate merges up to this time")->required();

    // bfw
    auto* sub_bfw = app.add_subcommand("bfw", "Breadth-first walk at one q");
    double q = 1.0;
    sub_bfw->add_option("--q", q, "Coalescent time")->required();
    add_mass_opts(sub_bfw);
    sub_bfw->add_option("--xi", xi_arg, "Inject clock values (bypasses --seed)");
    sub_bfw->add_option("--format", format,
                        "text | json | csv (csv: component_index,start,end,length,members)");

    // uribe
    auto* sub_uribe = app.add_subcommand("uribe", "Half-line diagram coalescent");
    std::optional<double> at_s;
    add_mass_opts(sub_uribe);
    sub_uribe->add_option("--xi", xi_arg, "Inject clock values (bypasses --seed)");
    sub_uribe->add_option("--s", at_s, "Report the partition and masses at this time");
    sub_uribe->add_option("--format", format,
                          "text | json | csv (csv: line_id,intercept,slope,stop_time,target)");

    // limit
    auto* sub_limit = app.add_subcommand("limit", "Limit process excursions");
    double kappa = 1.0, tau = 0.0, t_drift = 0.0, grid_step = 1e-4;
    std::optional<double> limit_horizon;
    std::string c_arg;
    double min_length = 0.0;
    bool dump_path = false;
    sub_limit->add_option("--kappa", kappa, "Diffusion coefficient (>= 0)")->required();
    sub_limit->add_option("--tau", tau, "Time centering");
    sub_limit->add_option("--t", t_drift, "Drift parameter")->required();
    sub_limit->add_option("--c", c_arg, "Comma-separated jump rates, non-increasing");
    sub_limit->add_option("--grid-step", grid_step, "Timeline resolution");
    sub_limit->add_option("--horizon", limit_horizon,
                          "Simulation window (required when kappa = 0)");
    sub_limit->add_option("--min-length", min_length, "Drop excursions shorter than this");
    sub_limit->add_flag("--dump-path", dump_path, "Emit the path CSV (s,W,B) instead");
    sub_limit->add_option("--format", format, "csv | json (csv: start,end,length)");

    // compare
    auto* sub_compare = app.add_subcommand("compare", "Three-generator law comparison");
    double cmp_q = 1.0;
    std::size_t samples = 10000;
    add_mass_opts(sub_compare);
    sub_compare->add_option("--q", cmp_q, "Coalescent time")->required();
    sub_compare->add_option("--samples", samples, "Replications per generator");

    // scaling
    auto* sub_scaling = app.add_subcommand("scaling", "Scaled-walk convergence harness");
    std::size_t scale_n = 10000, scale_seeds = 1000;
    double scale_t = 0.0, scale_grid = 1e-4;
    std::string scale_c_arg, n_list_arg;
    bool hypotheses_only = false;
    sub_scaling->add_option("--n", scale_n, "Blocks in the pre-limit state");
    sub_scaling->add_option("--t", scale_t, "Drift parameter");
    sub_scaling->add_option("--seeds", scale_seeds, "Replications per side");
    sub_scaling->add_option("--grid-step", scale_grid, "Limit-side timeline resolution");
    sub_scaling->add_option("--c", scale_c_arg, "Distinguished-block targets (dust sequence)");
    sub_scaling->add_flag("--hypotheses", hypotheses_only, "Only run the hypothesis residuals");
    sub_scaling->add_option("--n-list", n_list_arg, "Sizes for --hypotheses, e.g. 100,1000,10000");

    // suite
    auto* sub_suite = app.add_subcommand("suite", "Run the acceptance battery");
    std::optional<int> only_criterion;
    sub_suite->add_option("--criterion", only_criterion, "Run a single criterion (1-based)");

    CLI11_PARSE(app, argc, argv);
    set_default_threads(threads);

    try {
        if (*sub_direct) {
            const MassVector x = load_masses(masses_arg, masses_file);
            const auto traj = direct_mc::simulate_direct(x, horizon, seed);
            json events = json::array();
            for (const auto& e : traj.events) {
                events.push_back(json{{"t", e.time}, {"left", e.left}, {"right", e.right}});
            }
            const json out{{"schema_version", kSchemaVersion},
                           {"initial", partition_json(traj.initial)},
                           {"events", events}};
            emit(out.dump(2) + "\n", output, force);
        } else if (*sub_bfw) {
            const MassVector x = load_masses(masses_arg, masses_file);
            const ClockFamily clocks = clocks_for(x, parse_doubles(xi_arg), seed, 0);
            const auto expl = bfw::explore(bfw::build_walk(x, clocks, q));
            const auto lengths = bfw::excursion_lengths(expl);
            const Partition part = bfw::partition_at_q(x, clocks, q);
            if (format == "csv") {
                std::ostringstream os;
                os << "component_index,start,end,length,members\n";
                for (std::size_t i = 0; i < expl.components.size(); ++i) {
                    const auto& c = expl.components[i];
                    os << i + 1 << ',' << num(c.start) << ',' << num(c.end) << ','
                       << num(c.mass()) << ',';
                    for (std::size_t m = 0; m < c.members.size(); ++m) {
                        if (m) os << ';';
                        os << c.members[m];
                    }
                    os << '\n';
                }
                emit(os.str(), output, force);
            } else if (format == "json") {
                json comps = json::array();
                for (const auto& c : expl.components) {
                    comps.push_back(json{{"root", c.root},
                                         {"members", c.members},
                                         {"start", c.start},
                                         {"end", c.end},
                                         {"length", c.mass()}});
                }
                const json out{{"schema_version", kSchemaVersion},
                               {"q", q},
                               {"partition", partition_json(part)},
                               {"lengths", lengths.lengths},
                               {"components", comps}};
                emit(out.dump(2) + "\n", output, force);
            } else {
                std::ostringstream os;
                os << "partition " << partition_text(part) << "\nlengths (";
                for (std::size_t i = 0; i < lengths.size(); ++i) {
                    if (i) os << ',';
                    os << lengths[i];
                }
                os << ")\n";
                emit(os.str(), output, force);
            }
        } else if (*sub_uribe) {
            const MassVector x = load_masses(masses_arg, masses_file);
            const ClockFamily clocks = clocks_for(x, parse_doubles(xi_arg), seed, 0);
            const auto diagram = uribe::build_diagram(x, clocks);
            const auto uc = uribe::run_coalescent(diagram);
            if (format == "csv") {
                std::ostringstream os;
                os << "line_id,intercept,slope,stop_time,target\n";
                for (std::size_t k = 0; k < diagram.size(); ++k) {
                    os << k + 1 << ',' << num(diagram.intercepts[k]) << ','
                       << num(-diagram.slope_mags[k]) << ',' << num(diagram.stop_times[k]) << ','
                       << diagram.targets[k] << '\n';
                }
                emit(os.str(), output, force);
            } else if (format == "json") {
                json events = json::array();
                for (const auto& e : uc.events) {
                    events.push_back(
                        json{{"time", e.time}, {"absorber", e.absorber}, {"absorbed", e.absorbed}});
                }
                json out{{"schema_version", kSchemaVersion}, {"events", events}};
                if (at_s) {
                    out["s"] = *at_s;
                    out["partition"] = partition_json(uribe::partition_at(uc, *at_s));
                    out["masses"] = uribe::mass_process(uc, *at_s).lengths;
                }
                emit(out.dump(2) + "\n", output, force);
            } else {
                std::ostringstream os;
                if (at_s) {
                    const auto masses = uribe::mass_process(uc, *at_s);
                    os << "partition " << partition_text(uribe::partition_at(uc, *at_s))
                       << "\nmasses (";
                    for (std::size_t i = 0; i < masses.size(); ++i) {
                        if (i) os << ',';
                        os << masses[i];
                    }
                    os << ")\n";
                } else {
                    for (const auto& e : uc.events) {
                        os << "s=" << e.time << " line " << e.absorbed << " -> line " << e.absorber
                           << '\n';
                    }
                }
                emit(os.str(), output, force);
            }
        } else if (*sub_limit) {
            limit::ParamTriple p{kappa, tau, parse_doubles(c_arg), false};
            if (kappa == 0.0 && p.c.empty()) {
                std::cerr << "warning: kappa = 0 with empty c is a deterministic path\n";
            }
            const double hz = limit_horizon ? *limit_horizon : limit::default_horizon(p, t_drift);
            const auto path = limit::simulate_levy(p, t_drift, grid_step, hz, seed);
            const auto rp = limit::reflect(path);
            if (dump_path) {
                std::ostringstream os;
                os << "s,W,B\n";
                for (std::size_t i = 0; i < rp.times.size(); ++i) {
                    os << num(rp.times[i]) << ',' << num(rp.values[i]) << ','
                       << num(rp.reflected[i]) << '\n';
                }
                emit(os.str(), output, force);
            } else {
                const auto exc = limit::limit_excursions(rp, min_length);
                if (format == "json") {
                    json intervals = json::array();
                    for (const auto& [a, b] : exc.intervals) {
                        intervals.push_back(json{{"start", a}, {"end", b}, {"length", b - a}});
                    }
                    const json out{{"schema_version", kSchemaVersion},
                                   {"kappa", kappa},
                                   {"tau", tau},
                                   {"t", t_drift},
                                   {"grid_step", grid_step},
                                   {"horizon", hz},
                                   {"lengths", exc.lengths.lengths},
                                   {"intervals", intervals},
                                   {"truncated_open", exc.truncated_open},
                                   {"open_length", exc.open_length},
                                   {"discarded_tail_c3", path.discarded_tail_c3}};
                    emit(out.dump(2) + "\n", output, force);
                } else {
                    std::ostringstream os;
                    os << "start,end,length\n";
                    for (const auto& [a, b] : exc.intervals) {
                        os << num(a) << ',' << num(b) << ',' << num(b - a) << '\n';
                    }
                    emit(os.str(), output, force);
                    if (exc.truncated_open) {
                        std::cerr << "warning: excursion open at horizon (running length "
                                  << exc.open_length << ") excluded\n";
                    }
                }
            }
        } else if (*sub_compare) {
            const MassVector x = load_masses(masses_arg, masses_file);
            const auto reports = stats::partition_law_equality(x, cmp_q, samples, seed);
            json arr = json::array();
            bool all = true;
            for (const auto& r : reports) {
                arr.push_back(report_json(r));
                all = all && r.pass;
            }
            const json out{{"schema_version", kSchemaVersion},
                           {"q", cmp_q},
                           {"samples", samples},
                           {"reports", arr},
                           {"all_pass", all}};
            emit(out.dump(2) + "\n", output, force);
        } else if (*sub_scaling) {
            const auto seq = scale_c_arg.empty() ? scaling::standard_sequence()
                                                 : scaling::dust_sequence(parse_doubles(scale_c_arg));
            if (hypotheses_only) {
                std::vector<std::size_t> ns;
                for (double v : parse_doubles(n_list_arg.empty() ? "100,1000,10000" : n_list_arg)) {
                    ns.push_back(static_cast<std::size_t>(v));
                }
                const auto rep = scaling::check_hypotheses(seq, ns, 0.2);
                json rows = json::array();
                for (const auto& row : rep.rows) {
                    rows.push_back(json{{"n", row.n},
                                        {"moment_residual", row.moment_residual},
                                        {"block_residual", row.block_residual},
                                        {"sigma2", row.sigma2}});
                }
                const json out{{"schema_version", kSchemaVersion},
                               {"sequence", seq.name},
                               {"tolerance", rep.tolerance},
                               {"rows", rows},
                               {"pass", rep.pass}};
                emit(out.dump(2) + "\n", output, force);
            } else {
                const auto rep =
                    scaling::convergence_test(seq, scale_t, scale_n, scale_seeds, scale_grid, seed);
                json rows = json::array();
                for (const auto& f : rep.functionals) {
                    rows.push_back(json{{"n", rep.n},
                                        {"t", rep.t},
                                        {"functional", f.functional},
                                        {"ks_stat", f.ks.statistic},
                                        {"p_value", f.ks.p_value},
                                        {"n_samples", f.ks.n_samples}});
                }
                const json out{{"schema_version", kSchemaVersion},
                               {"sequence", seq.name},
                               {"reports", rows},
                               {"pass", rep.pass}};
                emit(out.dump(2) + "\n", output, force);
            }
        } else if (*sub_suite) {
            json rows = json::array();
            bool all_pass = true;
            if (only_criterion) {
                const auto r = suite::run_criterion(*only_criterion, seed);
                std::cerr << "criterion " << r.id << " [" << r.name << "] "
                          << (r.pass ? "PASS" : "FAIL") << " " << r.detail << "\n";
                rows.push_back(json{{"id", r.id},
                                    {"name", r.name},
                                    {"pass", r.pass},
                                    {"detail", r.detail},
                                    {"seconds", r.seconds}});
                all_pass = r.pass;
            } else {
                const auto res = suite::run_all(seed, &std::cerr);
                all_pass = res.all_pass;
                for (const auto& r : res.criteria) {
                    rows.push_back(json{{"id", r.id},
                                        {"name", r.name},
                                        {"pass", r.pass},
                                        {"detail", r.detail},
                                        {"seconds", r.seconds}});
                }
            }
            const json out{{"schema_version", kSchemaVersion},
                           {"seed", seed},
                           {"criteria", rows},
                           {"all_pass", all_pass}};
            emit(out.dump(2) + "\n", output, force);
            return all_pass ? 0 : 2;
        }
    } catch (const CLI::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
