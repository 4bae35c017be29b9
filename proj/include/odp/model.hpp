#pragma once

#include <string>
#include <variant>
#include <vector>

#include "odp/distributions.hpp"

namespace odp {

/// How a class tolerates a busy worker.
enum class Patience {
    on_demand,  ///< lost when the worker is busy
    patient,    ///< waits indefinitely, may be preempted
};

struct CustomerClass {
    std::string name;
    double arrival_rate = 0.0;  ///< customers per hour
    DurationDistribution duration = DurationDistribution::exponential(1.0);
    ValuationDistribution valuation = ValuationDistribution::uniform(0.0, 1.0);
    Patience patience = Patience::on_demand;

    /// Offered load: arrival rate times mean duration.
    double load() const noexcept { return arrival_rate * duration.mean(); }
    double service_rate() const noexcept { return duration.rate(); }
};

struct WorkerSpec {
    double cost = 0.0;                  ///< per busy hour
    int rank = 1;                       ///< 1 is the best
    double commission_retention = 1.0;  ///< fraction of the price the worker keeps
};

struct NoDiscount {};

struct ExponentialDiscount {
    double rate = 1.0;
};

struct MixtureComponent {
    double weight = 1.0;
    double rate = 1.0;
};

/// Horizon that is exponential with rate `rate` of a component drawn by `weight`.
struct MixtureDiscount {
    std::vector<MixtureComponent> components;
};

using Discount = std::variant<NoDiscount, ExponentialDiscount, MixtureDiscount>;

/// How customers choose among several workers.
enum class ChoiceRule {
    bica,      ///< highest-ranked available worker the customer can afford
    cheapest,  ///< cheapest available affordable worker; workers are undifferentiated
};

/// Per-class prices of one worker, per hour.
using PriceVector = std::vector<double>;

struct Scenario {
    std::vector<CustomerClass> classes;
    std::vector<WorkerSpec> workers{WorkerSpec{}};
    Discount discount = NoDiscount{};
    int queue_capacity = 0;
    ChoiceRule choice_rule = ChoiceRule::bica;

    double cost() const { return workers.front().cost; }
    double total_load() const;
    double total_arrival_rate() const;
    bool has_patient_class() const;
    bool is_discounted() const { return !std::holds_alternative<NoDiscount>(discount); }

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

/// Worker-side view of a class when the platform keeps 1 - retention of the price:
/// valuation rescaled so the tail at a net rate p equals the original tail at p/retention.
CustomerClass apply_commission(const WorkerSpec& worker, const CustomerClass& cls);

/// Scenario expressed in net rates of its first worker; retention is reset to 1.
Scenario net_scenario(const Scenario& scenario);

/// Per-job price equivalent of an hourly rate: rate times mean duration.
double per_job_price(double hourly_rate, const CustomerClass& cls);

/// Single-worker, single-class helper used in tests and examples.
Scenario single_class_scenario(double arrival_rate, double service_rate, ValuationDistribution valuation,
                               double cost = 0.0);

}  // namespace odp
