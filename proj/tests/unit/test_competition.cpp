#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "odp/competition.hpp"
#include "odp/error.hpp"
#include "odp/optimizer.hpp"

using namespace odp;
using namespace odp::test;
using doctest::Approx;

TEST_SUITE("competition") {

TEST_CASE("busy fraction") {
    const std::vector<double> p = {2 - kSqrt2};
    CHECK(busy_fraction(unit_single(), p) == Approx(1 - 1 / kSqrt2).epsilon(1e-14));
    const std::vector<double> top = {1.0, 2.0};
    CHECK(busy_fraction(two_class_example(), top) == 0.0);
    const std::vector<double> half = {0.5};
    auto heavy = single_class_scenario(1e9, 1.0, ValuationDistribution::uniform(0, 1));
    CHECK(busy_fraction(heavy, half) == Approx(1.0).epsilon(1e-8));
}

TEST_CASE("residual demand at the extremes of upstream busyness") {
    const auto c = exp_class(2.0, 1.0, ValuationDistribution::uniform(0, 1));
    const auto always = residual_demand(c, 0.6, 1.0);
    const auto never = residual_demand(c, 0.6, 0.0);
    for (double p = 0; p <= 1; p += 0.05) {
        CHECK(always.rate(p) == Approx(2.0 * (1 - p)).epsilon(1e-14));
        CHECK(never.rate(p) == Approx(2.0 * std::max(0.0, 0.6 - p)).epsilon(1e-14));
    }
}

TEST_CASE("residual demand formula") {
    const auto c = exp_class(1.5, 1.0, ValuationDistribution::uniform(0, 1));
    const auto d = residual_demand(c, 0.6, 0.3);
    CHECK(d.rate(0.8) == Approx(1.5 * 0.3 * 0.2).epsilon(1e-14));
    CHECK(d.rate(0.2) == Approx(1.5 * (0.6 - 0.2) + 1.5 * 0.3 * 0.4).epsilon(1e-14));
    CHECK(d.total() == Approx(1.5 * (0.6 + 0.3 * 0.4)).epsilon(1e-14));
    CHECK(std::abs(d.rate(0.6 - 1e-13) - d.rate(0.6)) <= 1e-12);
    double prev = d.rate(0);
    for (int i = 1; i <= 10000; ++i) {
        const double r = d.rate(i / 10000.0);
        REQUIRE(r <= prev + 1e-15);
        prev = r;
    }
}

TEST_CASE("residual demand behind two upstream workers") {
    const auto c = exp_class(1.0, 1.0, ValuationDistribution::uniform(0, 1));
    const auto d = residual_demand(c, {{0.7, 0.4}, {0.5, 0.2}});
    // v in [0.5, 0.7): passes the 0.5 worker when busy; v >= 0.7: passes both when busy.
    CHECK(d.rate(0.3) == Approx(0.2 + 0.2 * 0.2 + 0.3 * 0.2 * 0.4).epsilon(1e-14));
    CHECK(d.rate(0.6) == Approx(0.1 * 0.2 + 0.3 * 0.08).epsilon(1e-14));
    CHECK(d.upstream().front().price == 0.5);
}

TEST_CASE("a single ranked worker solves the monopoly problem") {
    const EquilibriumProfile eq = bica_equilibrium(two_class_example());
    const OptimalSolution sol = solve_fixed_point(two_class_example());
    REQUIRE(eq.workers.size() == 1);
    CHECK(eq.workers[0].prices == sol.prices);
    CHECK(eq.workers[0].rate == sol.rate);
}

TEST_CASE("two ranked workers") {
    const Scenario s = ranked_workers(2);
    const EquilibriumProfile eq = bica_equilibrium(s);
    REQUIRE(eq.workers.size() == 2);
    CHECK(eq.workers[0].rank == 1);
    CHECK(eq.workers[0].prices[0] == Approx(2 - kSqrt2).epsilon(1e-9));
    CHECK(eq.workers[0].busy_fraction == Approx(1 - 1 / kSqrt2).epsilon(1e-9));
    // Oracle for the second worker: direct residual functional on a 1e-6 grid.
    const double p1 = 2 - kSqrt2, b1 = 1 - 1 / kSqrt2;
    auto second = [&](double p) {
        const double d = p < p1 ? (p1 - p) + b1 * (1 - p1) : b1 * (1 - p);
        return p * d / (1 + d);
    };
    const auto [x, best] = grid_argmax(second, 0, 1, 1e-6);
    CHECK(eq.workers[1].prices[0] == Approx(x).epsilon(1e-5));
    CHECK(eq.workers[1].rate == Approx(best).epsilon(1e-10));
    CHECK(eq.workers[1].busy_fraction > 0.0);
    CHECK(eq.workers[1].busy_fraction < 1.0);
}

TEST_CASE("commission: equilibrium prices are gross, rates net") {
    Scenario s = ranked_workers(2);
    s.workers[0].commission_retention = 0.8;
    const EquilibriumProfile eq = bica_equilibrium(s);
    CHECK(eq.workers[0].prices[0] == Approx((2 - kSqrt2)).epsilon(1e-9));
    CHECK(eq.workers[0].rate == Approx(0.8 * (3 - 2 * kSqrt2)).epsilon(1e-9));
}

TEST_CASE("higher ranks ignore everything below them") {
    Scenario s = two_class_example();
    s.workers = {WorkerSpec{0.05, 1, 1}, WorkerSpec{0.0, 2, 1}, WorkerSpec{0.1, 3, 1}};
    const EquilibriumProfile eq = bica_equilibrium(s);
    Scenario changed = s;
    changed.workers[2].cost = 0.3;
    changed.workers[1].commission_retention = 0.7;
    const EquilibriumProfile eq2 = bica_equilibrium(changed);
    CHECK(eq2.workers[0].prices == eq.workers[0].prices);
    CHECK(eq2.workers[0].rate == eq.workers[0].rate);
    Scenario only3 = s;
    only3.workers[2].cost = 0.25;
    const EquilibriumProfile eq3 = bica_equilibrium(only3);
    CHECK(eq3.workers[0].prices == eq.workers[0].prices);
    CHECK(eq3.workers[1].prices == eq.workers[1].prices);
    CHECK(eq3.workers[1].rate == eq.workers[1].rate);
    CHECK(eq3.workers[2].prices != eq.workers[2].prices);
}

TEST_CASE("worker order in the scenario does not matter") {
    Scenario s = ranked_workers(3);
    s.workers[0].cost = 0.1;
    const EquilibriumProfile eq = bica_equilibrium(s);
    std::swap(s.workers[0], s.workers[2]);
    const EquilibriumProfile swapped = bica_equilibrium(s);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(swapped.workers[j].rank == eq.workers[j].rank);
        CHECK(swapped.workers[j].prices == eq.workers[j].prices);
    }
}

TEST_CASE("identical valuation laws give class-uniform prices at every rank") {
    Scenario s;
    const auto v = ValuationDistribution::uniform(0, 1.5);
    s.classes = {exp_class(1.0, 1.0, v), exp_class(2.5, 0.5, v), exp_class(0.4, 3.0, v)};
    s.workers = {WorkerSpec{0.0, 1, 1}, WorkerSpec{0.1, 2, 1}, WorkerSpec{0.0, 3, 1}};
    const EquilibriumProfile eq = bica_equilibrium(s);
    for (const auto& w : eq.workers) {
        CHECK(w.prices[1] == w.prices[0]);
        CHECK(w.prices[2] == w.prices[0]);
    }
}

TEST_CASE("competition preconditions") {
    CHECK_THROWS_AS(bica_equilibrium(ranked_workers(2, ChoiceRule::cheapest)), NoEquilibrium);
    Scenario q = ranked_workers(2);
    q.classes.push_back(q.classes[0]);
    q.queue_capacity = 1;
    CHECK_THROWS_AS(bica_equilibrium(q), ModelMismatch);
}

TEST_CASE("busy-set chain") {
    const std::vector<double> one = {0.55};
    CHECK(ctmc_worker_rates(unit_single(), one)[0] ==
          Approx(avg_earning_rate(unit_single(), one)).epsilon(1e-13));
    const std::vector<double> two = {2 - kSqrt2, 0.4};
    const auto r = ctmc_worker_rates(ranked_workers(2), two);
    CHECK(r[0] == Approx(3 - 2 * kSqrt2).epsilon(1e-12));
    const std::vector<double> same = {0.5, 0.5};
    const auto c = ctmc_worker_rates(ranked_workers(2, ChoiceRule::cheapest), same);
    CHECK(c[0] == Approx(c[1]).epsilon(1e-13));
    // Two identical workers sharing load: Erlang loss with two servers.
    const double a = 0.5;  // offered paying load
    const double busy_total =  // expected busy servers
        (a + a * a) / (1 + a + a * a / 2);
    CHECK(c[0] + c[1] == Approx(0.5 * busy_total).epsilon(1e-12));
}

TEST_CASE("best-response dynamics") {
    DynamicsReport one = best_response_dynamics(unit_single());
    CHECK(one.fixed_point);
    CHECK(one.rounds == 1);
    CHECK(std::abs(one.trajectory.back()[0] - (2 - kSqrt2)) <= 0.005 + 1e-12);

    const DynamicsReport cyc = best_response_dynamics(ranked_workers(2, ChoiceRule::cheapest));
    CHECK_FALSE(cyc.fixed_point);
    CHECK(cyc.cycle);
    CHECK(cyc.rounds <= 100);
    CHECK(cyc.cycle_length > 1);
    CHECK(cyc.trajectory[static_cast<std::size_t>(cyc.cycle_start)] == cyc.trajectory.back());

    DynamicsOptions approx;
    approx.model = RevenueModel::residual_approximation;
    const DynamicsReport ranked = best_response_dynamics(ranked_workers(2), approx);
    const EquilibriumProfile eq = bica_equilibrium(ranked_workers(2));
    CHECK(ranked.fixed_point);
    for (std::size_t j = 0; j < 2; ++j)
        CHECK(std::abs(ranked.trajectory.back()[j] - eq.workers[j].prices[0]) <= 0.01);

    const DynamicsReport exact = best_response_dynamics(ranked_workers(2));
    CHECK(exact.fixed_point);
    CHECK(exact.trajectory.back()[0] == ranked.trajectory.back()[0]);
}

}  // TEST_SUITE
