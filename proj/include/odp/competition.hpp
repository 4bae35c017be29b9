#pragma once

#include <vector>

#include "odp/model.hpp"

namespace odp {

/// Fraction of time a loss-system worker is busy: sum rho_k tail_k / (1 + sum rho_k tail_k).
double busy_fraction(const Scenario& single_worker, std::span<const double> prices);

struct UpstreamWorker {
    double price = 0.0;  ///< this class's price at the upstream worker
    double busy = 0.0;   ///< long-run busy fraction of the upstream worker
};

/// Rate of class-k customers, with valuation at least p, that reach a lower-ranked worker after
/// every higher-ranked worker either priced them out or was busy. Higher-ranked workers are
/// treated as independently busy with their long-run busy fractions, and the overflow stream as
/// Poisson.
class ResidualDemandCurve {
public:
    ResidualDemandCurve(double arrival_rate, ValuationDistribution valuation, std::vector<UpstreamWorker> upstream);

    /// D(p)
    double rate(double price) const;
    /// Residual fraction of the class that buys at this price (rate divided by the arrival rate).
    double share(double price) const;
    /// D(0): everything that reaches this worker.
    double total() const { return rate(0.0); }

    double arrival_rate() const noexcept { return arrival_rate_; }
    const ValuationDistribution& valuation() const noexcept { return valuation_; }
    const std::vector<UpstreamWorker>& upstream() const noexcept { return upstream_; }

private:
    double arrival_rate_;
    ValuationDistribution valuation_;
    std::vector<UpstreamWorker> upstream_;  // sorted by price
};

ResidualDemandCurve residual_demand(const CustomerClass& cls, double upstream_price, double upstream_busy);
ResidualDemandCurve residual_demand(const CustomerClass& cls, std::vector<UpstreamWorker> upstream);

struct WorkerEquilibrium {
    int rank = 1;
    PriceVector prices;  ///< gross prices charged to customers
    double rate = 0.0;   ///< net long-run earning rate
    double busy_fraction = 0.0;
};

struct EquilibriumProfile {
    std::vector<WorkerEquilibrium> workers;  ///< in rank order
};

/// Grid resolution of the residual-demand price search.
inline constexpr int kResidualGridPoints = 10000;

/// Net earning rate of a worker facing residual demand curves at the given gross prices.
double residual_rate(const std::vector<ResidualDemandCurve>& demand, const std::vector<CustomerClass>& classes,
                     const WorkerSpec& worker, std::span<const double> prices);

/// Best prices of a worker facing residual demand: Dinkelbach iteration on the opportunity rate
/// with a grid plus golden-section price search per class (residual valuations are not regular).
WorkerEquilibrium best_residual_prices(const std::vector<ResidualDemandCurve>& demand,
                                       const std::vector<CustomerClass>& classes, const WorkerSpec& worker);

/// Hierarchical price equilibrium under best-I-can-afford customer choice. The top-ranked worker
/// solves the single-worker problem; each following worker best-responds to the residual demand
/// left by everyone ranked above it. `workers` may be a permutation; the result is in rank order.
EquilibriumProfile bica_equilibrium(const Scenario& scenario);

// ---------------------------------------------------------------------------
// Best-response dynamics
// ---------------------------------------------------------------------------

enum class RevenueModel {
    exact_ctmc,             ///< continuous-time Markov chain over busy sets, exponential durations
    residual_approximation  ///< the independence model used by bica_equilibrium (BICA only)
};

/// Long-run net earning rate of every worker at the given single-class prices, from the
/// stationary law of the busy-set Markov chain under the scenario's choice rule.
std::vector<double> ctmc_worker_rates(const Scenario& scenario, std::span<const double> prices);

struct DynamicsOptions {
    int rounds = 100;
    double grid_step = 0.01;
    RevenueModel model = RevenueModel::exact_ctmc;
};

struct DynamicsReport {
    std::vector<std::vector<double>> trajectory;  ///< price profile before round 1 and after each round
    bool fixed_point = false;
    bool cycle = false;
    int cycle_start = -1;  ///< trajectory index where the cycle begins
    int cycle_length = 0;
    int rounds = 0;
    std::vector<double> rates;  ///< of the last profile
};

/// Sequential discrete best responses on a price grid for a single-class scenario. Stops at a
/// fixed profile, at the first revisited profile (a cycle), or after `rounds` rounds.
DynamicsReport best_response_dynamics(const Scenario& scenario, const DynamicsOptions& options = {});

}  // namespace odp
