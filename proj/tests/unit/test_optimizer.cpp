#include <cmath>
#include <sstream>

#include "doctest.h"
#include "helpers.hpp"
#include "odp/error.hpp"
#include "odp/optimizer.hpp"
#include "odp/rng.hpp"
#include "odp/search.hpp"

using namespace odp;
using namespace odp::test;
using doctest::Approx;

namespace {

double m_two_class(double r) {
    if (r <= 1) return (6 - 3 * r * r) / (2 * (8 - 3 * r));
    if (r <= 2) return (4 - r * r) / (2 * (6 - r));
    return 0.0;
}

Scenario random_regular(RandomStream& rng, std::size_t k) {
    Scenario s;
    for (std::size_t i = 0; i < k; ++i) {
        ValuationDistribution v = rng.uniform() < 0.5 ? ValuationDistribution::uniform(0, 0.5 + 2 * rng.uniform())
                                                      : ValuationDistribution::exponential(0.5 + 3 * rng.uniform());
        s.classes.push_back(exp_class(0.2 + 3 * rng.uniform(), 0.3 + 2 * rng.uniform(), v));
    }
    s.workers.front().cost = 0.2 * rng.uniform();
    return s;
}

}  // namespace

TEST_SUITE("optimizer") {

TEST_CASE("price response of uniform laws") {
    const auto u1 = ValuationDistribution::uniform(0, 1);
    const auto u2 = ValuationDistribution::uniform(0, 2);
    CHECK(price_response(u1, 0.40589, 0) == Approx((1 + 0.40589) / 2).epsilon(1e-12));
    CHECK(price_response(u2, 0.40589, 0) == Approx((2 + 0.40589) / 2).epsilon(1e-12));
    CHECK(price_response(u1, 0.40589, 0) == Approx(0.70294).epsilon(1e-5));
    CHECK(price_response(u2, 0.40589, 0) == Approx(1.20294).epsilon(1e-5));
    CHECK(price_response(u1, 1.0, 0) == 1.0);
    CHECK(price_response(u1, 3.0, 0) == 1.0);
    // uniform(a, b): argmax (p - t)(b - p) is (b + t)/2 when that exceeds a, else a.
    const auto ua = ValuationDistribution::uniform(0.5, 1.5);
    CHECK(price_response(ua, 0.3, 0.1) == Approx(0.95).epsilon(1e-12));
    CHECK(price_response(ua, 0.0, 0.0) == Approx(0.75).epsilon(1e-12));
}

TEST_CASE("price response of an exponential law is threshold plus mean") {
    const auto e = ValuationDistribution::exponential(2.0);
    for (double r : {0.0, 0.3, 1.7}) CHECK(price_response(e, r, 0.1) == Approx(0.1 + r + 0.5).epsilon(1e-11));
}

TEST_CASE("price response rejects irregular laws") {
    const auto bumpy = ValuationDistribution::piecewise_linear({{0, 0}, {0.2, 0.45}, {0.8, 0.5}, {1, 1}});
    CHECK_THROWS_AS(price_response(bumpy, 0.1, 0), IrregularDistribution);
}

TEST_CASE("price response is nondecreasing in the opportunity rate") {
    const std::vector<ValuationDistribution> laws = {
        ValuationDistribution::uniform(0, 1), ValuationDistribution::exponential(1.3),
        ValuationDistribution::piecewise_linear({{0, 0}, {0.5, 0.25}, {1, 1}})};
    for (const auto& d : laws) {
        double prev = -1;
        for (double r = 0; r <= 2; r += 0.01) {
            const double p = price_response(d, r, 0.05);
            REQUIRE(p >= prev - 1e-12);
            prev = p;
        }
    }
}

TEST_CASE("rate map of the two-class example") {
    const Scenario s = two_class_example();
    CHECK(rate_map(s, 0) == Approx(0.375).epsilon(1e-13));
    CHECK(rate_map(s, 1) == Approx(0.3).epsilon(1e-13));
    CHECK(rate_map(s, 2.5) == 0.0);
    for (int i = 0; i <= 1000; ++i) {
        const double r = 2.0 * i / 1000;
        REQUIRE(std::abs(rate_map(s, r) - m_two_class(r)) <= 1e-12);
    }
}

TEST_CASE("fixed point of the two-class example") {
    for (double r0 : {0.0, 1.0, 2.0}) {
        const OptimalSolution sol = solve_fixed_point(two_class_example(), r0);
        CHECK(sol.converged);
        CHECK(sol.rate == Approx(0.40589).epsilon(1e-4));
        CHECK(sol.prices[0] == Approx(0.70294).epsilon(1e-4));
        CHECK(sol.prices[1] == Approx(1.20294).epsilon(1e-4));
        CHECK(sol.iterations <= 20);
        CHECK(std::abs(rate_map(two_class_example(), sol.rate) - sol.rate) <= 1e-10);
    }
    // Independent oracle: the root of 2(8 - 3R)R = 6 - 3R^2 on [0, 1].
    const double root = (16 - std::sqrt(256 - 72)) / 6;
    CHECK(solve_fixed_point(two_class_example()).rate == Approx(root).epsilon(1e-10));
}

TEST_CASE("single class fixed point is the single-price benchmark") {
    const OptimalSolution sol = solve_fixed_point(unit_single());
    CHECK(sol.prices[0] == Approx(2 - kSqrt2).epsilon(1e-9));
    CHECK(sol.rate == Approx(3 - 2 * kSqrt2).epsilon(1e-9));
}

TEST_CASE("no arrivals gives zero rate and monopoly prices") {
    Scenario s = two_class_example();
    for (auto& c : s.classes) c.arrival_rate = 0;
    s.workers.front().cost = 0.2;
    const OptimalSolution sol = solve_fixed_point(s);
    CHECK(sol.rate == 0.0);
    CHECK(sol.prices[0] == Approx(0.6).epsilon(1e-11));
    CHECK(sol.prices[1] == Approx(1.1).epsilon(1e-11));
}

TEST_CASE("trace is monotone, bounded by the fixed point, and the fixed point maximizes M") {
    RandomStream rng(12);
    for (int i = 0; i < 40; ++i) {
        const Scenario s = random_regular(rng, 1 + i % 3);
        for (double r0 : {0.0, 0.5, 3.0}) {
            const OptimalSolution sol = solve_fixed_point(s, r0);
            REQUIRE(sol.converged);
            for (std::size_t t = 2; t < sol.trace.size(); ++t)
                REQUIRE(sol.trace[t].rate >= sol.trace[t - 1].rate);
            for (std::size_t t = 1; t < sol.trace.size(); ++t) REQUIRE(sol.trace[t].rate <= sol.rate + 1e-12);
            for (double r = 0; r <= 3; r += 0.05) REQUIRE(rate_map(s, r) <= sol.rate + 1e-12);
        }
    }
}

TEST_CASE("fixed-point prices beat random prices and satisfy the opportunity-cost inequality") {
    RandomStream rng(13);
    for (int i = 0; i < 10; ++i) {
        const Scenario s = random_regular(rng, 2 + i % 2);
        const OptimalSolution sol = solve_fixed_point(s);
        const LossProblem lp = loss_problem(s);
        auto slack = [&](const std::vector<double>& p) {
            double sum = 0;
            for (std::size_t k = 0; k < p.size(); ++k)
                sum += lp.loads[k] * (p[k] - lp.cost - sol.rate) * lp.valuations[k].tail(p[k]);
            return sol.rate - sum;
        };
        CHECK(std::abs(slack(sol.prices)) <= 1e-8);
        for (int t = 0; t < 1000; ++t) {
            std::vector<double> p;
            for (const auto& c : s.classes) p.push_back(rng.uniform() * c.valuation.upper());
            REQUIRE(loss_rate(lp, p) <= sol.rate + 1e-12);
            REQUIRE(slack(p) >= -1e-12);
        }
    }
}

TEST_CASE("classes sharing a valuation law get one price") {
    RandomStream rng(14);
    for (int i = 0; i < 20; ++i) {
        Scenario s = random_regular(rng, 3);
        for (auto& c : s.classes) c.valuation = s.classes.front().valuation;
        const OptimalSolution sol = solve_fixed_point(s);
        CHECK(sol.prices[1] == sol.prices[0]);
        CHECK(sol.prices[2] == sol.prices[0]);
        s.discount = ExponentialDiscount{0.1 + 2 * rng.uniform()};
        const OptimalSolution d = solve_discounted(s);
        CHECK(d.prices[1] == Approx(d.prices[0]).epsilon(1e-9));
        CHECK(d.prices[2] == Approx(d.prices[0]).epsilon(1e-9));
    }
}

TEST_CASE("discounted solve") {
    Scenario s = unit_single();
    s.discount = ExponentialDiscount{1.0};
    const OptimalSolution d = solve_discounted(s);
    Scenario half = single_class_scenario(0.5, 1.0, ValuationDistribution::uniform(0, 1));
    const OptimalSolution ref = solve_fixed_point(half);
    CHECK(d.prices[0] == Approx(ref.prices[0]).epsilon(1e-12));
    CHECK(*d.discounted_value == Approx(ref.rate).epsilon(1e-12));
    const auto [x, best] = grid_argmax([](double p) { return 0.5 * p * (1 - p) / (1 + 0.5 * (1 - p)); }, 0, 1, 1e-6);
    CHECK(d.prices[0] == Approx(x).epsilon(2e-6));
    CHECK(*d.discounted_value == Approx(best).epsilon(1e-10));

    const OptimalSolution tiny = solve_discounted(two_class_example(), 1e-8);
    const OptimalSolution plain = solve_fixed_point(two_class_example());
    CHECK(tiny.prices[0] == Approx(plain.prices[0]).epsilon(1e-5));
    CHECK(tiny.prices[1] == Approx(plain.prices[1]).epsilon(1e-5));
    CHECK_THROWS_AS(solve_discounted(two_class_example()), ModelMismatch);
}

TEST_CASE("brute-force oracle") {
    const GridOptimum g = brute_force_oracle(two_class_example(), 1e-3);
    CHECK(std::abs(g.value - 0.40589) <= 1e-4);
    const GridOptimum one = brute_force_oracle(unit_single(), 1e-3);
    CHECK(std::abs(one.prices[0] - (2 - kSqrt2)) <= 1e-3);
    Scenario same = two_class_example();
    same.classes[1].valuation = same.classes[0].valuation;
    same.classes[1].arrival_rate = 2.5;
    const GridOptimum eq = brute_force_oracle(same, 1e-3);
    CHECK(std::abs(eq.prices[0] - eq.prices[1]) <= 1e-3 + 1e-12);
    Scenario four = two_class_example();
    four.classes.push_back(four.classes[0]);
    four.classes.push_back(four.classes[0]);
    CHECK_THROWS_AS(brute_force_oracle(four, 0.1), TooManyClasses);
}

TEST_CASE("trace CSV") {
    const OptimalSolution sol = solve_fixed_point(two_class_example());
    std::ostringstream out;
    write_trace_csv(out, sol);
    const std::string csv = out.str();
    CHECK(csv.rfind("t,R_t\n0,0\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == static_cast<long>(sol.trace.size()) + 2);
}

}  // TEST_SUITE

TEST_SUITE("search") {

TEST_CASE("golden section finds interior and boundary maxima") {
    CHECK(golden_section_max([](double x) { return -(x - 0.3) * (x - 0.3); }, 0, 1).x == Approx(0.3).epsilon(1e-8));
    CHECK(golden_section_max([](double x) { return x; }, 0, 1).x == 1.0);
    CHECK(golden_section_max([](double x) { return -x; }, 0, 1).x == 0.0);
}

TEST_CASE("grid plus golden escapes local maxima") {
    auto f = [](double x) { return std::sin(12 * x) + 0.5 * x; };
    const Maximum1D m = grid_golden_max(f, 0, 3, 200);
    const auto [x, best] = grid_argmax(f, 0, 3, 1e-6);
    CHECK(m.value >= best - 1e-10);
    CHECK(m.x == Approx(x).epsilon(1e-5));
}

TEST_CASE("coordinate search on a smooth concave function") {
    auto f = [](const std::vector<double>& p) {
        return -(p[0] - 0.2) * (p[0] - 0.2) - 2 * (p[1] - 0.7) * (p[1] - 0.7) - 0.5 * (p[0] - 0.2) * (p[1] - 0.7);
    };
    const MaximumND m = coordinate_search_max(f, {0, 0}, {1, 1});
    CHECK(m.x[0] == Approx(0.2).epsilon(1e-6));
    CHECK(m.x[1] == Approx(0.7).epsilon(1e-6));
}

}  // TEST_SUITE
