#include "odp/validate.hpp"

#include <algorithm>
#include <cmath>

#include "odp/competition.hpp"
#include "odp/dispatch.hpp"
#include "odp/error.hpp"
#include "odp/queue.hpp"
#include "odp/revenue.hpp"
#include "odp/rng.hpp"
#include "odp/simulator.hpp"

namespace odp {

namespace {

constexpr int kRandomPriceVectors = 1000;
const std::vector<double> kDeviationFactors = {0.8, 0.85, 0.9, 0.95, 1.05, 1.1, 1.15, 1.2};

class Battery {
public:
    Battery(const Scenario& s, const ValidationOptions& o) : s_(s), o_(o) {}

    double ref(double analytic) const { return analytic * (1.0 + o_.perturbation); }

    void exact(std::string name, double expected, double observed, double tol, std::string detail = {}) {
        CheckResult c{std::move(name), false, ref(expected), observed, tol, std::move(detail)};
        c.passed = std::abs(c.observed - c.expected) <= tol;
        report_.checks.push_back(std::move(c));
    }

    void statistical(std::string name, double expected, const Estimate& e) {
        CheckResult c{std::move(name), false, ref(expected), e.mean, o_.sigma * e.standard_error,
                      "standard error " + std::to_string(e.standard_error)};
        c.passed = std::abs(c.observed - c.expected) <= c.tolerance;
        report_.checks.push_back(std::move(c));
    }

    void flag(std::string name, bool ok, std::string detail) {
        report_.checks.push_back({std::move(name), ok, 0.0, 0.0, 0.0, std::move(detail)});
    }

    SimConfig sim(const Scenario& scenario) const {
        SimConfig c;
        c.scenario = scenario;
        c.seed = o_.seed;
        c.replications = o_.replications;
        c.expected_arrivals = o_.expected_arrivals;
        c.threads = o_.threads;
        return c;
    }

    // Largest objective value at uniformly random price vectors in the box [0, upper].
    template <class F>
    double random_best(F&& objective) const {
        RandomStream rng(o_.seed, 0, 99);
        double best = -std::numeric_limits<double>::infinity();
        std::vector<double> p(s_.classes.size());
        for (int i = 0; i < kRandomPriceVectors; ++i) {
            for (std::size_t k = 0; k < p.size(); ++k) p[k] = rng.uniform() * s_.classes[k].valuation.upper();
            best = std::max(best, objective(p));
        }
        return best;
    }

    ValidationReport take() { return std::move(report_); }

private:
    const Scenario& s_;
    const ValidationOptions& o_;
    ValidationReport report_;
};

void check_loss(Battery& b, const Scenario& s, const AnalyticResult& a) {
    const Scenario net = net_scenario(s);
    const OptimalSolution& sol = *a.solution;
    b.exact("fixed_point_residual", sol.rate, rate_map(net, sol.rate), 1e-10);
    bool monotone = true;
    for (std::size_t t = 1; t < sol.trace.size(); ++t)
        if (sol.trace[t].rate < sol.trace[t - 1].rate || sol.trace[t].rate > sol.rate + 1e-12) monotone = false;
    b.flag("trace_monotone", monotone, std::to_string(sol.trace.size()) + " trace points");
    const LossProblem problem = loss_problem(net);
    const double best = b.random_best([&](const std::vector<double>& p) { return loss_rate(problem, p); });
    b.flag("optimal_against_random_prices", best <= b.ref(sol.rate) + 1e-12,
           "best random rate " + std::to_string(best));
    b.statistical("simulated_rate", sol.rate, simulate(b.sim(s), a.prices.front()).value);
}

void check_discounted(Battery& b, const Scenario& s, const AnalyticResult& a) {
    const double gamma = std::get<ExponentialDiscount>(s.discount).rate;
    const Scenario net = net_scenario(s);
    const double direct = discounted_value(net, a.solution->prices, gamma);
    b.exact("discounted_value_identity", a.value, direct, 1e-12 * std::max(1.0, std::abs(direct)));
    b.statistical("simulated_discounted_value", a.value, simulate_discounted(b.sim(s), a.prices.front(), gamma).value);
}

void check_mixture(Battery& b, const Scenario& s, const AnalyticResult& a) {
    const Scenario net = net_scenario(s);
    const double best = b.random_best([&](const std::vector<double>& p) { return mixture_horizon_value(net, p); });
    b.flag("optimal_against_random_prices", best <= b.ref(a.value) + 1e-12, "best random value " + std::to_string(best));
    b.statistical("simulated_mixture_value", a.value, simulate_discounted(b.sim(s), a.prices.front()).value);
}

void check_queue(Battery& b, const Scenario& s, const AnalyticResult& a) {
    const QueueInstance q = QueueInstance::from_scenario(net_scenario(s));
    const double retention = s.workers.front().commission_retention;
    const double pa = a.prices.front()[0] * retention;
    const double pb = a.prices.front()[1] * retention;
    b.exact("closed_form_vs_first_step", queue_rate_closed_form(q, pa, pb), first_step_solve(q, pa, pb).rate(), 1e-12);
    b.statistical("simulated_queue_rate", a.value, simulate_queue(b.sim(s), a.prices.front()).value);
}

void check_hybrid(Battery& b, const Scenario& s, const AnalyticResult& a) {
    const HybridSolution& h = *a.hybrid;
    Scenario alone = s;
    std::erase_if(alone.classes, [](const CustomerClass& c) { return c.patience == Patience::patient; });
    PriceVector prices;
    for (std::size_t k = 0; k < s.classes.size(); ++k)
        if (s.classes[k].patience == Patience::on_demand) prices.push_back(a.prices.front()[k]);
    const SimStats st = simulate(b.sim(alone), prices);
    Estimate idle = st.workers.front().busy_fraction;
    idle.mean = 1.0 - idle.mean;
    b.statistical("simulated_idle_fraction", h.idle_fraction, idle);
    b.flag("patient_feasibility", true, h.feasible ? "patient class can be served in idle time"
                                                   : "patient arrivals exceed idle capacity");
}

void check_bica(Battery& b, const Scenario& s, const AnalyticResult& a) {
    const EquilibriumProfile& eq = *a.equilibrium;
    const SimConfig cfg = b.sim(s);
    const SimStats st = simulate(cfg, a.prices);
    const auto& top = eq.workers.front();
    for (std::size_t j = 0; j < s.workers.size(); ++j)
        if (s.workers[j].rank == top.rank)
            b.statistical("simulated_top_worker_rate", top.rate, st.workers[j].value);
    for (std::size_t j = 0; j < s.workers.size(); ++j) {
        const DeviationScan scan = deviation_scan(cfg, a.prices, j, kDeviationFactors);
        double best = -std::numeric_limits<double>::infinity();
        for (const auto& p : scan.points) best = std::max(best, p.delta / std::max(p.delta_standard_error, 1e-300));
        b.flag("no_profitable_deviation_rank_" + std::to_string(s.workers[j].rank), !scan.any_improvement(),
               "largest delta/SE " + std::to_string(best));
    }
}

void check_cheapest(Battery& b, const Scenario& s) {
    if (s.classes.size() != 1 || !s.classes.front().duration.is_exponential()) {
        b.flag("undifferentiated_model", true, "no analytic cross-check for this shape");
        return;
    }
    Scenario one = s;
    one.workers = {s.workers.front()};
    const double monopoly = solve_fixed_point(net_scenario(one)).prices.front() / s.workers.front().commission_retention;
    const std::vector<double> flat(s.workers.size(), monopoly);
    const std::vector<double> rates = ctmc_worker_rates(s, flat);
    std::vector<PriceVector> prices;
    for (double p : flat) prices.push_back({p});
    const SimStats st = simulate(b.sim(s), prices);
    for (std::size_t j = 0; j < s.workers.size(); ++j)
        b.statistical("simulated_chain_rate_worker_" + std::to_string(j), rates[j], st.workers[j].value);
}

}  // namespace

bool ValidationReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.passed; });
}

ValidationReport validate_scenario(const Scenario& scenario, const ValidationOptions& options) {
    scenario.validate();
    Battery b(scenario, options);
    const ModelKind kind = classify(scenario);
    if (kind == ModelKind::competition && scenario.choice_rule == ChoiceRule::cheapest) {
        check_cheapest(b, scenario);
        return b.take();
    }
    const AnalyticResult a = solve_scenario(scenario);
    switch (kind) {
        case ModelKind::loss: check_loss(b, scenario, a); break;
        case ModelKind::discounted: check_discounted(b, scenario, a); break;
        case ModelKind::mixture: check_mixture(b, scenario, a); break;
        case ModelKind::queue: check_queue(b, scenario, a); break;
        case ModelKind::hybrid: check_hybrid(b, scenario, a); break;
        case ModelKind::competition: check_bica(b, scenario, a); break;
    }
    return b.take();
}

}  // namespace odp
