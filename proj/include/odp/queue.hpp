#pragma once

#include <optional>
#include <vector>

#include "odp/model.hpp"
#include "odp/search.hpp"

namespace odp {

/// Two classes sharing one worker with a waiting room for a single customer.
/// Durations must be exponential; an arrival that finds the waiting slot taken is lost.
struct QueueInstance {
    CustomerClass a;
    CustomerClass b;
    double cost = 0.0;

    /// Throws ModelMismatch unless the scenario has two classes, exponential durations and capacity 1.
    static QueueInstance from_scenario(const Scenario& scenario);
    /// lambda_A = mu_A = 1, lambda_B = mu_B = r, uniform(0,1) valuations, zero cost.
    static QueueInstance symmetric_load(double r);

    Scenario to_scenario() const;
};

/// Expected earnings (P) and durations (T) of the Markov chain started from: 0, an empty
/// system about to idle; 1 (2), a class-A (B) job just accepted with an empty waiting slot.
struct FirstStepSolution {
    double earnings_idle = 0.0;  ///< P0
    double earnings_a = 0.0;     ///< P1
    double earnings_b = 0.0;     ///< P2
    double time_idle = 0.0;      ///< T0
    double time_a = 0.0;         ///< T1
    double time_b = 0.0;         ///< T2

    double rate() const { return earnings_idle / time_idle; }
};

/// Long-run earning rate of the capacity-1 queue in closed form.
double queue_rate_closed_form(const QueueInstance& instance, double price_a, double price_b);

/// Solves the first-step equations as two 2x2 linear systems. Throws SingularSystem when no
/// customer of either class is willing to pay.
FirstStepSolution first_step_solve(const QueueInstance& instance, double price_a, double price_b);

struct TwoPriceOptimum {
    double price_a = 0.0;
    double price_b = 0.0;
    double value = 0.0;
};

TwoPriceOptimum queue_optimize(const QueueInstance& instance, const CoordinateSearchOptions& options = {});

/// r values of the optimal-price-versus-r sweep: 0.1..1 in steps of 0.1, then 20 log-spaced
/// points from 1 to 100 (1 appears once).
std::vector<double> queue_r_grid();

struct HybridSolution {
    bool feasible = false;
    double price_on_demand = 0.0;
    std::optional<double> price_patient;  ///< empty when infeasible
    double idle_fraction = 0.0;           ///< fraction of time not serving on-demand jobs
};

/// Prices for an on-demand class and a preemptible, infinitely patient class. The patient class
/// imposes no externality as long as its arrival rate stays below the service capacity left idle
/// by the on-demand class; otherwise the result is marked infeasible.
HybridSolution hybrid_solve(const CustomerClass& on_demand, const CustomerClass& patient, double cost);
HybridSolution hybrid_solve(const Scenario& scenario);

/// Weighted sum over horizon components of gamma_i times the expected discounted earnings at
/// gamma_i, i.e. the per-component loss-system rate with discount-adjusted loads. An exponential
/// discount is treated as a one-component mixture.
double mixture_horizon_value(const Scenario& scenario, std::span<const double> prices);

struct PriceOptimum {
    PriceVector prices;
    double value = 0.0;
};

PriceOptimum mixture_horizon_optimize(const Scenario& scenario, const CoordinateSearchOptions& options = {});

}  // namespace odp
