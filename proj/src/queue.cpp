#include "odp/queue.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "odp/error.hpp"
#include "odp/optimizer.hpp"
#include "odp/revenue.hpp"

namespace odp {

namespace {

struct PayingRates {
    double a, b, total;
};

PayingRates paying_rates(const QueueInstance& q, double pa, double pb) {
    const double a = q.a.arrival_rate * q.a.valuation.tail(pa);
    const double b = q.b.arrival_rate * q.b.valuation.tail(pb);
    return {a, b, a + b};
}

std::vector<MixtureComponent> horizon_components(const Scenario& s) {
    if (const auto* m = std::get_if<MixtureDiscount>(&s.discount)) return m->components;
    if (const auto* e = std::get_if<ExponentialDiscount>(&s.discount)) return {{1.0, e->rate}};
    throw ModelMismatch("mixture horizon value needs a discounted scenario");
}

}  // namespace

QueueInstance QueueInstance::from_scenario(const Scenario& s) {
    if (s.queue_capacity != 1) throw ModelMismatch("queue model needs queue_capacity = 1");
    if (s.classes.size() != 2) throw ModelMismatch("queue model needs exactly two classes");
    if (s.workers.size() != 1) throw ModelMismatch("queue model has one worker");
    for (const auto& c : s.classes)
        if (!c.duration.is_exponential()) throw ModelMismatch("queue model needs exponential durations");
    return {s.classes[0], s.classes[1], s.cost()};
}

QueueInstance QueueInstance::symmetric_load(double r) {
    const auto u = ValuationDistribution::uniform(0.0, 1.0);
    return {CustomerClass{"A", 1.0, DurationDistribution::exponential(1.0), u, Patience::on_demand},
            CustomerClass{"B", r, DurationDistribution::exponential(r), u, Patience::on_demand}, 0.0};
}

Scenario QueueInstance::to_scenario() const {
    Scenario s;
    s.classes = {a, b};
    s.workers = {WorkerSpec{cost, 1, 1.0}};
    s.queue_capacity = 1;
    return s;
}

double queue_rate_closed_form(const QueueInstance& q, double pa, double pb) {
    const auto [la, lb, total] = paying_rates(q, pa, pb);
    const double ma = q.a.service_rate();
    const double mb = q.b.service_rate();
    const double busy_a = la / ma;
    const double busy_b = lb / mb;
    const double num = busy_a * (pa - q.cost) + busy_b * (pb - q.cost);
    const double idle = (la * ma + lb * mb + ma * mb) / ((total + ma) * (total + mb));
    return num / (idle + busy_a + busy_b);
}

FirstStepSolution first_step_solve(const QueueInstance& q, double pa, double pb) {
    const auto [la, lb, total] = paying_rates(q, pa, pb);
    if (!(total > 0.0)) throw SingularSystem("no paying customers: first-step system is singular");
    const double ma = q.a.service_rate();
    const double mb = q.b.service_rate();

    // x_i = r_i + sum_j Pr(next queued job is j | current job i) x_j
    Eigen::Matrix2d m;
    m << 1.0 - la / (total + ma), -lb / (total + ma),
        -la / (total + mb), 1.0 - lb / (total + mb);
    Eigen::Matrix<double, 2, 2> rhs;
    rhs << (pa - q.cost) / ma, 1.0 / ma,
           (pb - q.cost) / mb, 1.0 / mb;
    const Eigen::FullPivLU<Eigen::Matrix2d> lu(m);
    if (!lu.isInvertible()) throw SingularSystem("first-step system is singular");
    const Eigen::Matrix2d x = lu.solve(rhs);

    FirstStepSolution s;
    s.earnings_a = x(0, 0);
    s.earnings_b = x(1, 0);
    s.time_a = x(0, 1);
    s.time_b = x(1, 1);
    s.earnings_idle = (la * s.earnings_a + lb * s.earnings_b) / total;
    s.time_idle = 1.0 / total + (la * s.time_a + lb * s.time_b) / total;
    return s;
}

TwoPriceOptimum queue_optimize(const QueueInstance& q, const CoordinateSearchOptions& options) {
    auto objective = [&q](const std::vector<double>& p) { return queue_rate_closed_form(q, p[0], p[1]); };
    const MaximumND m = coordinate_search_max(objective, {0.0, 0.0}, {q.a.valuation.upper(), q.b.valuation.upper()},
                                              options);
    return {m.x[0], m.x[1], m.value};
}

std::vector<double> queue_r_grid() {
    std::vector<double> grid;
    for (int i = 1; i <= 10; ++i) grid.push_back(0.1 * i);
    grid.back() = 1.0;
    for (int i = 1; i < 20; ++i) grid.push_back(std::pow(10.0, 2.0 * i / 19.0));
    return grid;
}

HybridSolution hybrid_solve(const CustomerClass& on_demand, const CustomerClass& patient, double cost) {
    if (!on_demand.duration.is_exponential() || !patient.duration.is_exponential())
        throw ModelMismatch("hybrid model needs exponential durations");
    LossProblem alone;
    alone.loads = {on_demand.load()};
    alone.valuations = {on_demand.valuation};
    alone.cost = cost;
    const OptimalSolution sol = solve_fixed_point(alone);

    HybridSolution out;
    out.price_on_demand = sol.prices.front();
    out.idle_fraction = 1.0 - loss_busy_fraction(alone, sol.prices);
    out.feasible = patient.arrival_rate < out.idle_fraction * patient.service_rate();
    if (out.feasible) out.price_patient = price_response(patient.valuation, 0.0, cost);
    return out;
}

HybridSolution hybrid_solve(const Scenario& s) {
    const CustomerClass* od = nullptr;
    const CustomerClass* pt = nullptr;
    for (const auto& c : s.classes) {
        if (c.patience == Patience::patient) {
            if (pt) throw ModelMismatch("hybrid model takes one patient class");
            pt = &c;
        } else {
            if (od) throw ModelMismatch("hybrid model takes one on-demand class");
            od = &c;
        }
    }
    if (!od || !pt) throw ModelMismatch("hybrid model needs one on-demand and one patient class");
    return hybrid_solve(*od, *pt, s.cost());
}

double mixture_horizon_value(const Scenario& s, std::span<const double> prices) {
    double value = 0.0;
    for (const auto& c : horizon_components(s)) value += c.weight * c.rate * discounted_value(s, prices, c.rate);
    return value;
}

PriceOptimum mixture_horizon_optimize(const Scenario& s, const CoordinateSearchOptions& options) {
    horizon_components(s);
    std::vector<double> lower(s.classes.size(), 0.0), upper;
    for (const auto& c : s.classes) upper.push_back(c.valuation.upper());
    const MaximumND m = coordinate_search_max(
        [&s](const std::vector<double>& p) { return mixture_horizon_value(s, p); }, lower, upper, options);
    return {m.x, m.value};
}

}  // namespace odp
