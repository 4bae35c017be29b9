#include "odp/revenue.hpp"

#include <cmath>
#include <string>

#include "odp/error.hpp"
#include "odp/rng.hpp"

namespace odp {

namespace {

void require_loss_system(const Scenario& s) {
    if (s.queue_capacity != 0) throw ModelMismatch("earning functional models a loss system; scenario has a queue");
    if (s.workers.size() != 1)
        throw ModelMismatch("earning functional models one worker; scenario has " + std::to_string(s.workers.size()));
}

void require_prices(std::size_t classes, std::span<const double> prices) {
    if (prices.size() != classes)
        throw ModelMismatch("expected " + std::to_string(classes) + " prices, got " + std::to_string(prices.size()));
}

}  // namespace

LossProblem loss_problem(const Scenario& scenario) {
    LossProblem p;
    p.cost = scenario.cost();
    for (const auto& c : scenario.classes) {
        p.loads.push_back(c.load());
        p.valuations.push_back(c.valuation);
    }
    return p;
}

double loss_rate(const LossProblem& problem, std::span<const double> prices) {
    require_prices(problem.size(), prices);
    double num = 0.0;
    double den = 1.0;
    for (std::size_t k = 0; k < problem.size(); ++k) {
        const double w = problem.loads[k] * problem.valuations[k].tail(prices[k]);
        num += w * (prices[k] - problem.cost);
        den += w;
    }
    return num / den;
}

double loss_busy_fraction(const LossProblem& problem, std::span<const double> prices) {
    require_prices(problem.size(), prices);
    double w = 0.0;
    for (std::size_t k = 0; k < problem.size(); ++k) w += problem.loads[k] * problem.valuations[k].tail(prices[k]);
    return w / (1.0 + w);
}

double avg_earning_rate(const Scenario& scenario, std::span<const double> prices) {
    require_loss_system(scenario);
    return loss_rate(loss_problem(scenario), prices);
}

double effective_load(const CustomerClass& cls, double gamma) {
    if (!(gamma > 0.0)) throw ModelMismatch("discount rate must be positive");
    return cls.arrival_rate * cls.duration.expected_min_with_exponential(gamma);
}

EffectiveLoad effective_loads(const Scenario& scenario, double gamma) {
    EffectiveLoad out;
    out.gamma = gamma;
    for (const auto& c : scenario.classes) out.loads.push_back(effective_load(c, gamma));
    return out;
}

LossProblem discounted_problem(const Scenario& scenario, double gamma) {
    LossProblem p = loss_problem(scenario);
    p.loads = effective_loads(scenario, gamma).loads;
    return p;
}

double discounted_value(const Scenario& scenario, std::span<const double> prices, double gamma) {
    require_loss_system(scenario);
    return loss_rate(discounted_problem(scenario, gamma), prices) / gamma;
}

double discounted_value(const Scenario& scenario, std::span<const double> prices) {
    const auto* d = std::get_if<ExponentialDiscount>(&scenario.discount);
    if (!d) throw ModelMismatch("discounted_value needs an exponential discount");
    return discounted_value(scenario, prices, d->rate);
}

RatioEstimate min_lemma_ratio(const DurationDistribution& x, double gamma, std::size_t draws, std::uint64_t seed) {
    if (!(gamma > 0.0)) throw ModelMismatch("discount rate must be positive");
    RandomStream rx(seed, 0, 0);
    RandomStream ry(seed, 0, 1);
    double s_i = 0.0, s_m = 0.0, s_ii = 0.0, s_mm = 0.0, s_im = 0.0;
    for (std::size_t n = 0; n < draws; ++n) {
        const double xv = x.sample(rx);
        const double yv = ry.exponential(gamma);
        const double ind = yv <= xv ? 1.0 : 0.0;
        const double m = std::min(xv, yv);
        s_i += ind;
        s_m += m;
        s_ii += ind * ind;
        s_mm += m * m;
        s_im += ind * m;
    }
    const double n = static_cast<double>(draws);
    const double mi = s_i / n, mm = s_m / n;
    const double vi = s_ii / n - mi * mi, vm = s_mm / n - mm * mm, cim = s_im / n - mi * mm;
    const double r = mi / mm;
    // Delta method for a ratio of means.
    const double var = (vi - 2.0 * r * cim + r * r * vm) / (mm * mm * n);
    return {r, std::sqrt(std::max(var, 0.0))};
}

}  // namespace odp
