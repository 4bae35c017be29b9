#include "odp/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "odp/error.hpp"
#include "odp/format.hpp"

namespace odp {

namespace {

void require_strictly_regular(const ValuationDistribution& dist, const std::string& where) {
    const Regularity r = regularity_check(dist);
    if (r != Regularity::strictly_regular)
        throw IrregularDistribution(where + dist.kind() + " valuation is " + to_string(r) +
                                    "; price response needs a strictly regular law");
}

std::vector<double> responses(const LossProblem& problem, double opportunity_rate) {
    std::vector<double> prices(problem.size());
    for (std::size_t k = 0; k < problem.size(); ++k)
        prices[k] = optimal_price(problem.valuations[k], problem.cost + opportunity_rate);
    return prices;
}

// Axis {0, step, ..., upper}; the upper end is always included.
std::vector<double> grid_axis(double upper, double step) {
    std::vector<double> axis;
    const auto n = static_cast<std::size_t>(std::floor(upper / step + 1e-9));
    axis.reserve(n + 2);
    for (std::size_t i = 0; i <= n; ++i) axis.push_back(std::min(upper, static_cast<double>(i) * step));
    if (axis.back() < upper) axis.push_back(upper);
    return axis;
}

}  // namespace

double optimal_price(const ValuationDistribution& dist, double threshold) {
    const double top = dist.upper();
    if (top <= threshold) return top;
    // Sign of (p - threshold) f(p) - tail(p): negative left of the optimum, positive right of it.
    auto excess = [&](double p) { return (p - threshold) * dist.density(p) - dist.tail(p); };
    double lo = std::max(threshold, 0.0);
    double hi = top;
    if (excess(hi) < 0.0) return hi;
    while (hi - lo > kPriceTolerance) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        if (excess(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

double price_response(const ValuationDistribution& dist, double opportunity_rate, double cost) {
    require_strictly_regular(dist, "");
    return optimal_price(dist, cost + opportunity_rate);
}

double price_response(const CustomerClass& cls, double opportunity_rate, double cost) {
    return price_response(cls.valuation, opportunity_rate, cost);
}

double rate_map(const LossProblem& problem, double opportunity_rate) {
    for (std::size_t k = 0; k < problem.size(); ++k)
        require_strictly_regular(problem.valuations[k], "class " + std::to_string(k) + ": ");
    const auto prices = responses(problem, opportunity_rate);
    return loss_rate(problem, prices);
}

double rate_map(const Scenario& scenario, double opportunity_rate) {
    return rate_map(loss_problem(scenario), opportunity_rate);
}

OptimalSolution solve_fixed_point(const LossProblem& problem, double initial_rate) {
    if (!(initial_rate >= 0.0)) throw ModelMismatch("initial rate must be >= 0");
    for (std::size_t k = 0; k < problem.size(); ++k)
        require_strictly_regular(problem.valuations[k], "class " + std::to_string(k) + ": ");

    OptimalSolution sol;
    double r = initial_rate;
    for (int t = 0; t < kFixedPointIterationCap; ++t) {
        const double next = loss_rate(problem, responses(problem, r));
        if (!std::isfinite(next)) throw NonFiniteRate("earning functional is not finite at R=" + std::to_string(r));
        sol.trace.push_back({r, next});
        sol.iterations = t + 1;
        const double step = std::abs(next - r);
        r = next;
        if (step <= kFixedPointTolerance) {
            sol.converged = true;
            break;
        }
    }
    sol.rate = r;
    sol.prices = responses(problem, r);
    return sol;
}

OptimalSolution solve_fixed_point(const Scenario& scenario, double initial_rate) {
    if (scenario.queue_capacity != 0) throw ModelMismatch("fixed-point solver models a loss system");
    return solve_fixed_point(loss_problem(scenario), initial_rate);
}

OptimalSolution solve_discounted(const Scenario& scenario, double gamma) {
    if (scenario.queue_capacity != 0) throw ModelMismatch("discounted solver models a loss system");
    if (!(gamma > 0.0)) throw ModelMismatch("discount rate must be positive");
    OptimalSolution sol = solve_fixed_point(discounted_problem(scenario, gamma));
    sol.discounted_value = sol.rate / gamma;
    return sol;
}

OptimalSolution solve_discounted(const Scenario& scenario) {
    const auto* d = std::get_if<ExponentialDiscount>(&scenario.discount);
    if (!d) throw ModelMismatch("solve_discounted needs an exponential discount");
    return solve_discounted(scenario, d->rate);
}

GridOptimum brute_force_oracle(const Scenario& scenario, double grid_step) {
    const std::size_t K = scenario.classes.size();
    if (K > kBruteForceMaxClasses)
        throw TooManyClasses("brute-force grid supports at most 3 classes, got " + std::to_string(K));
    if (!(grid_step > 0.0)) throw ModelMismatch("grid step must be positive");

    double scale = 1.0;
    LossProblem problem = loss_problem(scenario);
    if (const auto* d = std::get_if<ExponentialDiscount>(&scenario.discount)) {
        problem = discounted_problem(scenario, d->rate);
        scale = 1.0 / d->rate;
    }

    // Separable tables: numerator and denominator contributions of each grid price.
    std::vector<std::vector<double>> axis(3), num(3), den(3);
    for (std::size_t k = 0; k < 3; ++k) {
        if (k < K) {
            axis[k] = grid_axis(problem.valuations[k].upper(), grid_step);
            for (double p : axis[k]) {
                const double w = problem.loads[k] * problem.valuations[k].tail(p);
                num[k].push_back(w * (p - problem.cost));
                den[k].push_back(w);
            }
        } else {
            axis[k] = {0.0};
            num[k] = {0.0};
            den[k] = {0.0};
        }
    }

    double best = -std::numeric_limits<double>::infinity();
    std::size_t bi = 0, bj = 0, bl = 0;
    const std::size_t n0 = axis[0].size(), n1 = axis[1].size(), n2 = axis[2].size();
    const double* a2 = num[2].data();
    const double* b2 = den[2].data();
    for (std::size_t i = 0; i < n0; ++i) {
        for (std::size_t j = 0; j < n1; ++j) {
            const double a = num[0][i] + num[1][j];
            const double b = 1.0 + den[0][i] + den[1][j];
            double row_best = -std::numeric_limits<double>::infinity();
            std::size_t row_l = 0;
            for (std::size_t l = 0; l < n2; ++l) {
                const double v = (a + a2[l]) / (b + b2[l]);
                if (v > row_best) {
                    row_best = v;
                    row_l = l;
                }
            }
            if (row_best > best) {
                best = row_best;
                bi = i;
                bj = j;
                bl = row_l;
            }
        }
    }
    GridOptimum out;
    const std::size_t idx[3] = {bi, bj, bl};
    for (std::size_t k = 0; k < K; ++k) out.prices.push_back(axis[k][idx[k]]);
    out.value = best * scale;
    return out;
}

void write_trace_csv(std::ostream& out, const OptimalSolution& solution) {
    out << "t,R_t\n";
    int t = 0;
    for (const auto& point : solution.trace) out << t++ << ',' << exact_number(point.rate) << '\n';
    out << t << ',' << exact_number(solution.rate) << '\n';
}

}  // namespace odp
