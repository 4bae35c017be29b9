// odp: command-line front end of the pricing engine.

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "odp/config.hpp"
#include "odp/dispatch.hpp"
#include "odp/error.hpp"
#include "odp/report.hpp"
#include "odp/simulator.hpp"
#include "odp/validate.hpp"

namespace fs = std::filesystem;
using namespace odp;

namespace {

enum ExitCode : int { kOk = 0, kValidationFailed = 1, kConfig = 2, kIrregular = 3, kNoEquilibrium = 4 };

struct Common {
    std::string config;
    std::string out = "odp-out";
    std::uint64_t seed = 1;
};

struct SimOptions {
    std::size_t replications = 30;
    double arrivals = 1e5;
    double horizon = 0.0;
    unsigned threads = 0;
};

class Run {
public:
    Run(std::string command, const Common& common, int argc, char** argv) : common_(common) {
        manifest_.command = std::move(command);
        manifest_.config_path = common.config;
        manifest_.seed = common.seed;
        manifest_.argv.assign(argv, argv + argc);
        fs::create_directories(common.out);
    }

    Scenario scenario() const { return load_scenario(common_.config); }

    fs::path output(const std::string& name) {
        const fs::path p = fs::path(common_.out) / name;
        manifest_.outputs.push_back(p.string());
        return p;
    }

    void finish() {
        manifest_.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
        write_json_file(fs::path(common_.out) / "manifest.json", to_json(manifest_));
    }

private:
    Common common_;
    RunManifest manifest_;
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string join(const std::vector<double>& xs) {
    std::string s;
    for (std::size_t i = 0; i < xs.size(); ++i) s += (i ? ", " : "") + format_number(xs[i]);
    return s;
}

double parse_number(const std::string& text, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != text.size() || !std::isfinite(v)) throw ConfigError(what, "not a number: '" + text + "'");
    return v;
}

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(text);
    for (std::string item; std::getline(in, item, sep);) parts.push_back(item);
    if (!text.empty() && text.back() == sep) parts.emplace_back();
    return parts;
}

// "a:b:n" (linear), "log:a:b:n", "load-ratio", or a comma-separated list.
std::vector<double> parse_grid(const std::string& spec) {
    if (spec == "load-ratio") return queue_r_grid();
    auto parts = split(spec, ':');
    const bool log = !parts.empty() && parts.front() == "log";
    if (log) parts.erase(parts.begin());
    if (parts.size() == 3) {
        const double a = parse_number(parts[0], "grid");
        const double b = parse_number(parts[1], "grid");
        const double n = parse_number(parts[2], "grid");
        if (n < 1 || n != std::floor(n)) throw ConfigError("grid", "point count must be a positive integer");
        if (log && !(a > 0 && b > 0)) throw ConfigError("grid", "log grid bounds must be positive");
        std::vector<double> g;
        const auto count = static_cast<std::size_t>(n);
        for (std::size_t i = 0; i < count; ++i) {
            const double t = count == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(count - 1);
            g.push_back(log ? a * std::pow(b / a, t) : a + (b - a) * t);
        }
        return g;
    }
    if (log || parts.size() != 1) throw ConfigError("grid", "expected a:b:n, log:a:b:n, load-ratio or a comma list");
    std::vector<double> g;
    for (const auto& item : split(spec, ',')) g.push_back(parse_number(item, "grid"));
    return g;
}

// Workers separated by ';', class prices by ','.
std::vector<PriceVector> parse_prices(const std::string& text) {
    std::vector<PriceVector> out;
    for (std::size_t j = 0; const auto& worker : split(text, ';')) {
        PriceVector p;
        for (const auto& item : split(worker, ',')) p.push_back(parse_number(item, "prices/" + std::to_string(j)));
        out.push_back(std::move(p));
        ++j;
    }
    return out;
}

void print_result(const AnalyticResult& r) {
    std::cout << "model: " << to_string(r.kind) << '\n';
    if (r.equilibrium) {
        for (const auto& w : r.equilibrium->workers)
            std::cout << "rank " << w.rank << ": prices " << join(w.prices) << ", rate " << format_number(w.rate)
                      << ", busy " << format_number(w.busy_fraction) << '\n';
        return;
    }
    std::cout << "prices: " << join(r.prices.front()) << '\n';
    if (r.solution) {
        std::cout << "rate: " << format_number(r.solution->rate) << '\n';
        if (r.solution->discounted_value)
            std::cout << "discounted_value: " << format_number(*r.solution->discounted_value) << '\n';
        std::cout << "iterations: " << r.solution->iterations << (r.solution->converged ? "" : " (not converged)")
                  << '\n';
    } else {
        std::cout << (r.kind == ModelKind::mixture ? "value: " : "rate: ") << format_number(r.value) << '\n';
    }
    if (r.hybrid) {
        std::cout << "idle_fraction: " << format_number(r.hybrid->idle_fraction) << '\n';
        std::cout << "patient_feasible: " << (r.hybrid->feasible ? "yes" : "no") << '\n';
    }
}

nlohmann::json result_json(const AnalyticResult& r) {
    nlohmann::json doc = {{"model", to_string(r.kind)}, {"value", r.value}};
    doc["prices"] = r.prices;
    if (r.solution) doc["solution"] = to_json(*r.solution);
    if (r.equilibrium) doc["equilibrium"] = to_json(*r.equilibrium);
    if (r.hybrid) {
        doc["hybrid"] = {{"feasible", r.hybrid->feasible}, {"idle_fraction", r.hybrid->idle_fraction}};
        if (r.hybrid->price_patient) doc["hybrid"]["price_patient"] = *r.hybrid->price_patient;
    }
    return doc;
}

int cmd_solve(Run& run) {
    const AnalyticResult r = solve_scenario(run.scenario());
    print_result(r);
    write_json_file(run.output("solution.json"), result_json(r));
    if (r.solution) {
        std::ofstream trace(run.output("trace.csv"));
        write_trace_csv(trace, *r.solution);
    }
    run.finish();
    return kOk;
}

Scenario with_parameter(Scenario s, const std::string& parameter, double x) {
    if (parameter == "r") {
        if (s.classes.size() < 2) throw ConfigError("classes", "sweeping r needs a second class");
        auto& b = s.classes[1];
        b.arrival_rate *= x;
        b.duration = b.duration.time_scaled(1.0 / x);
    } else if (parameter == "gamma") {
        s.discount = ExponentialDiscount{x};
    } else if (parameter == "rho") {
        for (auto& c : s.classes) c.arrival_rate *= x;
    } else if (parameter == "beta") {
        for (auto& w : s.workers) w.commission_retention = x;
    }
    s.validate();
    return s;
}

int cmd_sweep(Run& run, const std::string& parameter, const std::string& grid_spec) {
    const Scenario base = run.scenario();
    const std::vector<double> grid = parse_grid(grid_spec);
    if (classify(base) == ModelKind::competition) throw ModelMismatch("sweeps cover single-worker scenarios");
    std::vector<SweepRow> rows;
    for (double x : grid) {
        const AnalyticResult r = solve_scenario(with_parameter(base, parameter, x));
        rows.push_back({x, r.prices.front(), r.solution ? r.solution->rate : r.value});
    }
    std::ostringstream shown;
    write_sweep_csv(shown, parameter, base.classes.size(), {});
    std::cout << shown.str();
    for (const auto& row : rows) {
        std::cout << format_number(row.parameter);
        for (double p : row.prices) std::cout << ',' << format_number(p);
        std::cout << ',' << format_number(row.rate) << '\n';
    }
    std::ofstream csv(run.output("sweep.csv"));
    write_sweep_csv(csv, parameter, base.classes.size(), rows);
    run.finish();
    return kOk;
}

int cmd_simulate(Run& run, const Common& common, const SimOptions& o, const std::string& prices_text, bool trace) {
    SimConfig cfg;
    cfg.scenario = run.scenario();
    cfg.seed = common.seed;
    cfg.replications = o.replications;
    cfg.expected_arrivals = o.arrivals;
    cfg.horizon = o.horizon;
    cfg.threads = o.threads;
    if (trace) cfg.trace_path = run.output("trace.csv");

    const std::vector<PriceVector> prices =
        prices_text == "solved" ? solve_scenario(cfg.scenario).prices : parse_prices(prices_text);
    const ModelKind kind = classify(cfg.scenario);
    SimStats st;
    if (prices.size() != cfg.scenario.workers.size())
        throw ConfigError("prices", "expected prices for " + std::to_string(cfg.scenario.workers.size()) +
                                        " worker(s), got " + std::to_string(prices.size()));
    switch (kind) {
        case ModelKind::queue: st = simulate_queue(cfg, prices.front()); break;
        case ModelKind::discounted:
        case ModelKind::mixture: st = simulate_discounted(cfg, prices.front()); break;
        default: st = simulate(cfg, prices); break;
    }
    std::cout << "model: " << to_string(kind) << '\n'
              << st.quantity << ": " << format_number(st.value.mean) << " (SE " << format_number(st.value.standard_error)
              << ", 95% CI [" << format_number(st.value.ci_low()) << ", " << format_number(st.value.ci_high()) << "])\n"
              << "arrivals: " << st.counts.arrivals << ", accepted: " << st.counts.accepted
              << ", lost_busy: " << st.counts.lost_busy << ", lost_price: " << st.counts.lost_price << '\n';
    if (st.workers.size() > 1)
        for (const auto& w : st.workers)
            std::cout << "rank " << w.rank << ": " << format_number(w.value.mean) << " (SE "
                      << format_number(w.value.standard_error) << ")\n";
    nlohmann::json doc = to_json(st);
    doc["prices"] = prices;
    write_json_file(run.output("simulation.json"), doc);
    run.finish();
    return kOk;
}

struct CompeteOptions {
    bool verify = false;
    bool dynamics = false;
    bool equilibrium = false;
    int rounds = 100;
    double step = 0.01;
    std::string model = "exact";
};

int cmd_compete(Run& run, const Common& common, const SimOptions& so, const CompeteOptions& o) {
    const Scenario s = run.scenario();
    if (o.dynamics) {
        DynamicsOptions d;
        d.rounds = o.rounds;
        d.grid_step = o.step;
        if (o.model == "residual") d.model = RevenueModel::residual_approximation;
        const DynamicsReport rep = best_response_dynamics(s, d);
        std::cout << "rounds: " << rep.rounds << '\n';
        if (rep.fixed_point) {
            std::cout << "fixed point: " << join(rep.trajectory.back()) << '\n';
        } else if (rep.cycle) {
            std::cout << "cycle: length " << rep.cycle_length << " starting at step " << rep.cycle_start << '\n';
            for (std::size_t t = static_cast<std::size_t>(rep.cycle_start); t < rep.trajectory.size(); ++t)
                std::cout << "  " << join(rep.trajectory[t]) << '\n';
        } else {
            std::cout << "no fixed point within " << rep.rounds << " rounds\n";
        }
        write_json_file(run.output("dynamics.json"), to_json(rep));
        run.finish();
        return kOk;
    }
    if (s.choice_rule == ChoiceRule::cheapest)
        throw NoEquilibrium("undifferentiated workers keep undercutting one another, so no pure price equilibrium "
                            "exists; run with --dynamics to see the price cycle");
    const EquilibriumProfile eq = bica_equilibrium(s);
    for (const auto& w : eq.workers)
        std::cout << "rank " << w.rank << ": prices " << join(w.prices) << ", rate " << format_number(w.rate)
                  << ", busy " << format_number(w.busy_fraction) << '\n';
    write_json_file(run.output("equilibrium.json"), to_json(eq));
    int code = kOk;
    if (o.verify) {
        SimConfig cfg;
        cfg.scenario = s;
        cfg.seed = common.seed;
        cfg.replications = so.replications;
        cfg.expected_arrivals = so.arrivals;
        cfg.horizon = so.horizon;
        cfg.threads = so.threads;
        const std::vector<double> factors = {0.8, 0.85, 0.9, 0.95, 1.05, 1.1, 1.15, 1.2};
        nlohmann::json scans = nlohmann::json::array();
        const auto prices = profile_prices(s, eq);
        for (std::size_t j = 0; j < s.workers.size(); ++j) {
            const DeviationScan scan = deviation_scan(cfg, prices, j, factors);
            std::cout << "deviation scan rank " << s.workers[j].rank << ": "
                      << (scan.any_improvement() ? "FAIL (profitable deviation found)" : "PASS") << '\n';
            if (scan.any_improvement()) code = kValidationFailed;
            scans.push_back(to_json(scan));
        }
        write_json_file(run.output("deviation.json"), scans);
    }
    run.finish();
    return code;
}

int cmd_validate(Run& run, const Common& common, const SimOptions& so, double perturbation) {
    ValidationOptions o;
    o.seed = common.seed;
    o.replications = so.replications;
    o.expected_arrivals = so.arrivals;
    o.threads = so.threads;
    o.perturbation = perturbation;
    const ValidationReport rep = validate_scenario(run.scenario(), o);
    nlohmann::json checks = nlohmann::json::array();
    for (const auto& c : rep.checks) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name;
        if (c.tolerance > 0.0)
            std::cout << " expected " << format_number(c.expected) << " observed " << format_number(c.observed)
                      << " tolerance " << format_number(c.tolerance);
        if (!c.detail.empty()) std::cout << " (" << c.detail << ')';
        std::cout << '\n';
        checks.push_back({{"name", c.name},
                          {"passed", c.passed},
                          {"expected", c.expected},
                          {"observed", c.observed},
                          {"tolerance", c.tolerance},
                          {"detail", c.detail}});
    }
    write_json_file(run.output("validation.json"), {{"passed", rep.passed()}, {"checks", checks}});
    run.finish();
    return rep.passed() ? kOk : kValidationFailed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal hourly pricing for on-demand workers"};
    app.set_version_flag("--version", std::string(ODP_VERSION));
    app.require_subcommand(1);

    Common common;
    SimOptions sim;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", common.config, "Scenario JSON file")->required();
        sub->add_option("--out", common.out, "Output directory")->capture_default_str();
        sub->add_option("--seed", common.seed, "Base random seed")->capture_default_str();
    };
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--replications", sim.replications, "Independent replications")->capture_default_str();
        sub->add_option("--arrivals", sim.arrivals, "Expected arrivals per replication")->capture_default_str();
        sub->add_option("--horizon", sim.horizon, "Hours per replication (overrides --arrivals)");
        sub->add_option("--threads", sim.threads, "Worker threads, 0 for all cores")->capture_default_str();
    };

    auto* solve = app.add_subcommand("solve", "Optimal prices of a scenario");
    add_common(solve);

    std::string parameter, grid;
    auto* sweep = app.add_subcommand("sweep", "Optimal prices over a parameter grid");
    add_common(sweep);
    sweep->add_option("--param", parameter, "r | gamma | rho | beta")
        ->required()
        ->check(CLI::IsMember({"r", "gamma", "rho", "beta"}));
    sweep->add_option("--grid", grid, "a:b:n, log:a:b:n, load-ratio, or a comma list")->required();

    std::string prices = "solved";
    bool trace = false;
    auto* simulate_cmd = app.add_subcommand("simulate", "Discrete-event estimate of earnings");
    add_common(simulate_cmd);
    add_sim(simulate_cmd);
    simulate_cmd->add_option("--prices", prices, "'solved' or per-worker lists, e.g. 0.7,1.2;0.5,0.9")
        ->capture_default_str();
    simulate_cmd->add_flag("--trace", trace, "Write the event log of replication 0");

    CompeteOptions compete_opts;
    auto* compete = app.add_subcommand("compete", "Equilibrium prices of several workers");
    add_common(compete);
    add_sim(compete);
    compete->add_flag("--verify", compete_opts.verify, "Simulated deviation scan for every worker");
    compete->add_flag("--dynamics", compete_opts.dynamics, "Run best-response dynamics");
    compete->add_flag("--equilibrium", compete_opts.equilibrium, "Request the equilibrium profile (default)");
    compete->add_option("--rounds", compete_opts.rounds, "Best-response rounds")->capture_default_str();
    compete->add_option("--step", compete_opts.step, "Best-response price grid step")->capture_default_str();
    compete->add_option("--model", compete_opts.model, "exact | residual")
        ->check(CLI::IsMember({"exact", "residual"}))
        ->capture_default_str();

    double perturbation = 0.0;
    auto* validate = app.add_subcommand("validate", "Analytic versus simulation cross-checks");
    add_common(validate);
    add_sim(validate);
    validate->add_option("--perturb", perturbation, "Relative error injected into analytic references")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (solve->parsed()) {
            Run run("solve", common, argc, argv);
            return cmd_solve(run);
        }
        if (sweep->parsed()) {
            Run run("sweep", common, argc, argv);
            return cmd_sweep(run, parameter, grid);
        }
        if (simulate_cmd->parsed()) {
            Run run("simulate", common, argc, argv);
            return cmd_simulate(run, common, sim, prices, trace);
        }
        if (compete->parsed()) {
            Run run("compete", common, argc, argv);
            return cmd_compete(run, common, sim, compete_opts);
        }
        Run run("validate", common, argc, argv);
        return cmd_validate(run, common, sim, perturbation);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const ModelMismatch& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kConfig;
    } catch (const IrregularDistribution& e) {
        std::cerr << "irregular distribution: " << e.what() << '\n';
        return kIrregular;
    } catch (const NoEquilibrium& e) {
        std::cerr << "no equilibrium: " << e.what() << '\n';
        return kNoEquilibrium;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kValidationFailed;
    }
}
