#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "odp/model.hpp"
#include "odp/revenue.hpp"

namespace odp {

inline constexpr double kPriceTolerance = 1e-12;
inline constexpr double kFixedPointTolerance = 1e-10;
inline constexpr int kFixedPointIterationCap = 100000;

/// argmax over [0, upper] of (p - threshold) * tail(p), assuming strict regularity (not checked).
/// Returns upper when upper <= threshold, otherwise the root of p - threshold - tail(p)/density(p)
/// located by bisection to a bracket of width kPriceTolerance.
double optimal_price(const ValuationDistribution& dist, double threshold);

/// Optimal price for a class when the worker's hourly cost is `cost` and being busy
/// forgoes `opportunity_rate` per hour. Throws IrregularDistribution unless the valuation
/// law is strictly regular.
double price_response(const ValuationDistribution& dist, double opportunity_rate, double cost);
double price_response(const CustomerClass& cls, double opportunity_rate, double cost);

/// Earning rate achieved by pricing every class at its response to `opportunity_rate`.
double rate_map(const LossProblem& problem, double opportunity_rate);
double rate_map(const Scenario& scenario, double opportunity_rate);

struct TracePoint {
    double rate = 0.0;    ///< R_t
    double mapped = 0.0;  ///< M(R_t)
};

struct OptimalSolution {
    PriceVector prices;
    double rate = 0.0;  ///< optimal long-run earning rate R*
    int iterations = 0;
    std::vector<TracePoint> trace;
    bool converged = false;
    std::optional<double> discounted_value;  ///< set by solve_discounted
};

/// Iterates R_{t+1} = M(R_t) from `initial_rate` until successive rates differ by at most
/// kFixedPointTolerance (or the iteration cap is hit).
OptimalSolution solve_fixed_point(const LossProblem& problem, double initial_rate = 0.0);
OptimalSolution solve_fixed_point(const Scenario& scenario, double initial_rate = 0.0);

/// Optimal prices under the scenario's exponential discount, via discount-adjusted loads.
OptimalSolution solve_discounted(const Scenario& scenario);
OptimalSolution solve_discounted(const Scenario& scenario, double gamma);

struct GridOptimum {
    PriceVector prices;
    double value = 0.0;
};

inline constexpr std::size_t kBruteForceMaxClasses = 3;

/// Exhaustive search over the grid {0, step, 2 step, ..., upper_k} in every coordinate.
/// Maximises the average earning rate, or the discounted value when the scenario carries an
/// exponential discount. Throws TooManyClasses for more than three classes.
GridOptimum brute_force_oracle(const Scenario& scenario, double grid_step);

/// CSV with header `t,R_t`; row t=0 is the starting rate.
void write_trace_csv(std::ostream& out, const OptimalSolution& solution);

}  // namespace odp
