#pragma once

#include <optional>
#include <string>
#include <vector>

#include "odp/competition.hpp"
#include "odp/optimizer.hpp"
#include "odp/queue.hpp"

namespace odp {

/// Which analytic model a scenario calls for.
enum class ModelKind {
    loss,         ///< one worker, no queue, no discount
    discounted,   ///< one worker, exponential discount
    mixture,      ///< one worker, mixture of exponential horizons
    queue,        ///< one worker, waiting room of one
    hybrid,       ///< one worker, one on-demand and one patient class
    competition,  ///< several workers
};

std::string to_string(ModelKind kind);
ModelKind classify(const Scenario& scenario);

struct AnalyticResult {
    ModelKind kind = ModelKind::loss;
    std::vector<PriceVector> prices;  ///< gross prices, one vector per worker in scenario order
    /// loss and queue: net earning rate; discounted: expected discounted earnings;
    /// mixture: mixture_horizon_value; hybrid: on-demand rate plus patient throughput margin;
    /// competition: sum of worker rates.
    double value = 0.0;
    std::optional<OptimalSolution> solution;  ///< loss and discounted
    std::optional<HybridSolution> hybrid;
    std::optional<EquilibriumProfile> equilibrium;
};

/// Solves the scenario with the model `classify` picks. Single-worker models are solved in net
/// rates and reported gross. Throws NoEquilibrium for undifferentiated competing workers.
AnalyticResult solve_scenario(const Scenario& scenario, const CoordinateSearchOptions& search = {});

}  // namespace odp
