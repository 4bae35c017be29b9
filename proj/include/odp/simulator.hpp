#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "odp/competition.hpp"
#include "odp/model.hpp"

namespace odp {

/// Monte Carlo run settings. Replication r draws from streams derived from (seed, r, stream),
/// one stream per customer class plus auxiliary streams, so results do not depend on how
/// replications are scheduled across threads.
struct SimConfig {
    Scenario scenario;
    double horizon = 0.0;               ///< hours; 0 means expected_arrivals / total arrival rate
    double expected_arrivals = 1e5;     ///< sizes the default horizon and the discounted path budget
    std::size_t replications = 30;
    std::uint64_t seed = 1;
    double warmup_fraction = 0.1;       ///< discarded head of each replication (rate estimates only)
    std::optional<std::filesystem::path> trace_path;  ///< per-event CSV of replication 0
    unsigned threads = 0;               ///< 0: hardware concurrency

    double effective_horizon() const;
    void validate() const;
};

struct EventCounts {
    std::uint64_t arrivals = 0;
    std::uint64_t accepted = 0;
    std::uint64_t lost_busy = 0;   ///< could afford some worker, none of those was available
    std::uint64_t lost_price = 0;  ///< could afford no worker

    EventCounts& operator+=(const EventCounts& o);
};

struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
    double ci_low() const { return mean - 1.96 * standard_error; }
    double ci_high() const { return mean + 1.96 * standard_error; }
    double half_width() const { return 1.96 * standard_error; }
};

/// Mean and standard error over replications.
Estimate summarize(const std::vector<double>& values);

struct WorkerSimStats {
    int rank = 1;
    Estimate value;
    Estimate busy_fraction;
    std::vector<double> replication_values;
};

struct SimStats {
    std::string quantity;  ///< "rate" (per hour) or "discounted_value"
    Estimate value;        ///< all workers combined
    std::vector<double> replication_values;
    std::vector<WorkerSimStats> workers;  ///< scenario order
    EventCounts counts;
    std::size_t replications = 0;
    double horizon = 0.0;
    std::size_t paths_per_replication = 0;  ///< discounted runs only
};

/// Loss-system simulation: one worker, or several ranked workers under the scenario's choice
/// rule. `prices[i]` holds worker i's gross per-class prices. Earnings accrue at
/// retention * price - cost per busy hour.
SimStats simulate(const SimConfig& config, const std::vector<PriceVector>& prices);
SimStats simulate(const SimConfig& config, const PriceVector& single_worker_prices);

/// Expected discounted earnings of one loss-system worker from an idle start at rate gamma.
SimStats simulate_discounted(const SimConfig& config, const PriceVector& prices, double gamma);
/// Uses the scenario's discount. For a mixture, each path draws its horizon component and
/// contributes gamma_i times its discounted earnings (the quantity of mixture_horizon_value).
SimStats simulate_discounted(const SimConfig& config, const PriceVector& prices);

/// Capacity-1 waiting room: an arrival finding the worker busy waits if the slot is free,
/// otherwise leaves. `prices` are per class.
SimStats simulate_queue(const SimConfig& config, const PriceVector& prices);

struct DeviationPoint {
    double factor = 1.0;
    PriceVector prices;
    Estimate value;
    double delta = 0.0;
    double delta_standard_error = 0.0;
    bool significant_improvement = false;  ///< delta above 1.96 combined standard errors
};

struct DeviationScan {
    std::size_t worker = 0;  ///< index into the scenario's workers
    Estimate baseline;
    std::vector<DeviationPoint> points;
    bool any_improvement() const;
};

/// Re-simulates with one worker's prices multiplied by each factor (others fixed, same seed)
/// and compares that worker's earning rate with the unperturbed profile.
DeviationScan deviation_scan(const SimConfig& config, const std::vector<PriceVector>& profile, std::size_t worker,
                             const std::vector<double>& factors);
DeviationScan deviation_scan(const SimConfig& config, const EquilibriumProfile& equilibrium, std::size_t worker,
                             const std::vector<double>& factors);

/// Gross prices of an equilibrium profile laid out in scenario worker order.
std::vector<PriceVector> profile_prices(const Scenario& scenario, const EquilibriumProfile& equilibrium);

}  // namespace odp
