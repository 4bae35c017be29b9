#pragma once

#include <cmath>
#include <vector>

#include "odp/model.hpp"

namespace odp::test {

inline const double kSqrt2 = std::sqrt(2.0);

inline CustomerClass exp_class(double lambda, double mu, ValuationDistribution v) {
    return CustomerClass{"", lambda, DurationDistribution::exponential(mu), std::move(v), Patience::on_demand};
}

/// Two classes: uniform(0,1) and uniform(0,2), unit loads, zero cost.
inline Scenario two_class_example() {
    Scenario s;
    s.classes = {exp_class(1, 1, ValuationDistribution::uniform(0, 1)),
                 exp_class(1, 1, ValuationDistribution::uniform(0, 2))};
    return s;
}

/// Single uniform(0,1) class with unit load.
inline Scenario unit_single() { return single_class_scenario(1.0, 1.0, ValuationDistribution::uniform(0, 1)); }

/// Horizon drawn Exp(1) or Exp(2) with equal probability; classes with mu 1 and 2.
inline Scenario mixture_example() {
    Scenario s;
    s.classes = {exp_class(1, 1, ValuationDistribution::uniform(0, 1)),
                 exp_class(1, 2, ValuationDistribution::uniform(0, 1))};
    s.discount = MixtureDiscount{{{0.5, 1.0}, {0.5, 2.0}}};
    return s;
}

/// Unit-load uniform(0,1) class shared by ranked workers.
inline Scenario ranked_workers(std::size_t n, ChoiceRule rule = ChoiceRule::bica) {
    Scenario s = unit_single();
    s.workers.clear();
    for (std::size_t j = 0; j < n; ++j) s.workers.push_back(WorkerSpec{0.0, static_cast<int>(j + 1), 1.0});
    s.choice_rule = rule;
    return s;
}

/// 1-D grid maximizer used as an oracle.
template <class F>
std::pair<double, double> grid_argmax(F&& f, double lo, double hi, double step) {
    double best_x = lo, best = f(lo);
    const auto n = static_cast<long>(std::floor((hi - lo) / step + 0.5));
    for (long i = 1; i <= n; ++i) {
        const double x = lo + static_cast<double>(i) * step;
        const double v = f(x);
        if (v > best) best = v, best_x = x;
    }
    return {best_x, best};
}

}  // namespace odp::test
