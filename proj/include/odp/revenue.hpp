#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "odp/model.hpp"

namespace odp {

/// The data of a single-worker loss system that the earning functional depends on:
/// per-class load, valuation law, and the worker's hourly cost.
struct LossProblem {
    std::vector<double> loads;
    std::vector<ValuationDistribution> valuations;
    double cost = 0.0;

    std::size_t size() const noexcept { return loads.size(); }
};

/// Loads rho_k = lambda_k / mu_k of a single-worker scenario.
LossProblem loss_problem(const Scenario& scenario);

/// Long-run earning rate sum rho_k (p_k - c) tail_k(p_k) / (1 + sum rho_k tail_k(p_k)).
double loss_rate(const LossProblem& problem, std::span<const double> prices);

/// Fraction of time the worker is busy at `prices`.
double loss_busy_fraction(const LossProblem& problem, std::span<const double> prices);

/// Long-run average earning rate of a single on-demand worker. Throws ModelMismatch for
/// scenarios with a queue or more than one worker.
double avg_earning_rate(const Scenario& scenario, std::span<const double> prices);

struct EffectiveLoad {
    std::vector<double> loads;  ///< lambda_k * E[min(X_k, Y)]
    double gamma = 0.0;
};

/// lambda * E[min(X, Y)] with Y ~ Exp(gamma).
double effective_load(const CustomerClass& cls, double gamma);
EffectiveLoad effective_loads(const Scenario& scenario, double gamma);

/// Loss problem with loads replaced by discount-adjusted loads.
LossProblem discounted_problem(const Scenario& scenario, double gamma);

/// Expected total discounted earnings from an idle start at discount rate gamma.
double discounted_value(const Scenario& scenario, std::span<const double> prices, double gamma);
/// As above with the scenario's exponential discount rate; ModelMismatch otherwise.
double discounted_value(const Scenario& scenario, std::span<const double> prices);

struct RatioEstimate {
    double value = 0.0;
    double standard_error = 0.0;
};

/// Monte Carlo estimate of P(Y <= X) / E[min(X, Y)] with Y ~ Exp(gamma) independent of X.
RatioEstimate min_lemma_ratio(const DurationDistribution& x, double gamma, std::size_t draws = 1000000,
                              std::uint64_t seed = 1);

}  // namespace odp
