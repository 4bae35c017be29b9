#include <cmath>
#include <numeric>

#include "doctest.h"
#include "helpers.hpp"
#include "odp/distributions.hpp"
#include "odp/error.hpp"
#include "odp/rng.hpp"

using namespace odp;
using doctest::Approx;

TEST_SUITE("distributions") {

TEST_CASE("uniform law basics") {
    const auto u = ValuationDistribution::uniform(0, 2);
    CHECK(u.cdf(0) == 0.0);
    CHECK(u.cdf(2) == 1.0);
    CHECK(u.cdf(0.5) == Approx(0.25));
    CHECK(u.tail(1.5) == Approx(0.25));
    CHECK(u.density(1.0) == Approx(0.5));
    CHECK(u.density(3.0) == 0.0);
    CHECK(u.quantile(0.5) == Approx(1.0));
    CHECK(u.upper() == 2.0);
    CHECK(u.lower() == 0.0);
}

TEST_CASE("tail and cdf are exact complements on a fine grid") {
    const std::vector<ValuationDistribution> laws = {
        ValuationDistribution::uniform(0, 1), ValuationDistribution::uniform(0.3, 2.5),
        ValuationDistribution::exponential(1.7),
        ValuationDistribution::piecewise_linear({{0, 0}, {0.5, 0.25}, {1, 1}})};
    for (const auto& d : laws) {
        for (int i = 0; i <= 10000; ++i) {
            const double p = d.upper() * i / 10000.0;
            REQUIRE(d.tail(p) + d.cdf(p) == 1.0);
        }
    }
}

TEST_CASE("densities integrate to one and cdfs are nondecreasing") {
    const std::vector<ValuationDistribution> laws = {
        ValuationDistribution::uniform(0, 1), ValuationDistribution::uniform(0.3, 2.5),
        ValuationDistribution::exponential(2.0),
        ValuationDistribution::piecewise_linear({{0, 0}, {0.2, 0.45}, {0.8, 0.5}, {1, 1}})};
    for (const auto& d : laws) {
        const int n = 200000;
        const double h = d.upper() / n;
        double mass = 0.0, prev = -1.0;
        for (int i = 0; i < n; ++i) {
            mass += d.density((i + 0.5) * h) * h;
            const double F = d.cdf(i * h);
            REQUIRE(F >= prev);
            prev = F;
        }
        CHECK(mass == Approx(1.0).epsilon(1e-6));
        CHECK(d.cdf(d.upper()) == Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("virtual value of uniform laws is linear") {
    CHECK(virtual_value(ValuationDistribution::uniform(0, 1), 0.5) == Approx(0.0));
    CHECK(virtual_value(ValuationDistribution::uniform(0, 2), 1.2029) == Approx(0.4058));
    for (double p : {0.1, 0.7, 1.9}) CHECK(virtual_value(ValuationDistribution::uniform(0, 2), p) == Approx(2 * p - 2));
}

TEST_CASE("virtual value of an exponential law is p minus the mean") {
    const auto e = ValuationDistribution::exponential(1.0);
    for (double p : {0.1, 1.0, 3.5}) CHECK(virtual_value(e, p) == Approx(p - 1.0));
}

TEST_CASE("piecewise-linear virtual value matches a finite-difference oracle") {
    const auto d = ValuationDistribution::piecewise_linear({{0, 0}, {0.5, 0.25}, {1, 1}});
    const double p = 0.7, h = 1e-6;
    const double f = (d.cdf(p + h) - d.cdf(p - h)) / (2 * h);
    CHECK(virtual_value(d, p) == Approx(p - (1 - d.cdf(p)) / f).epsilon(1e-8));
}

TEST_CASE("piecewise-linear density uses the right slope at knots") {
    const auto d = ValuationDistribution::piecewise_linear({{0, 0}, {0.5, 0.25}, {1, 1}});
    CHECK(d.density(0.5) == Approx(1.5));
    CHECK(d.density(0.25) == Approx(0.5));
}

TEST_CASE("virtual value throws where the density vanishes") {
    const auto d = ValuationDistribution::piecewise_linear({{0, 0}, {0.3, 0.5}, {0.6, 0.5}, {1, 1}});
    CHECK_THROWS_AS(virtual_value(d, 0.45), ZeroDensity);
}

TEST_CASE("regularity classification") {
    CHECK(regularity_check(ValuationDistribution::uniform(0, 1)) == Regularity::strictly_regular);
    CHECK(regularity_check(ValuationDistribution::uniform(0.5, 3)) == Regularity::strictly_regular);
    CHECK(regularity_check(ValuationDistribution::exponential(1.0)) == Regularity::strictly_regular);
    // Near-flat middle followed by a steep rise makes the virtual value drop.
    const auto bumpy = ValuationDistribution::piecewise_linear({{0, 0}, {0.2, 0.45}, {0.8, 0.5}, {1, 1}});
    CHECK(regularity_check(bumpy) == Regularity::irregular);
    // Independent grid oracle: the virtual value decreases somewhere.
    bool drops = false;
    for (int i = 1; i < 1000; ++i) {
        const double a = i / 1000.0, b = (i + 1) / 1000.0;
        if (b < 1 && virtual_value(bumpy, b) < virtual_value(bumpy, a)) drops = true;
    }
    CHECK(drops);
    CHECK(to_string(Regularity::irregular) == "irregular");
}

TEST_CASE("exponential valuations get an operational upper bound") {
    const auto e = ValuationDistribution::exponential(2.0);
    CHECK(e.upper() == Approx(-std::log(1e-12) / 2.0));
    CHECK(e.tail(e.upper()) == Approx(1e-12).epsilon(1e-6));
}

TEST_CASE("scaling a valuation law") {
    const auto u = ValuationDistribution::uniform(0, 1).scaled(0.8);
    CHECK(u == ValuationDistribution::uniform(0, 0.8));
    const auto e = ValuationDistribution::exponential(2.0).scaled(0.5);
    CHECK(e.tail(0.3) == Approx(std::exp(-2.0 * 0.6)));
    const auto pl = ValuationDistribution::piecewise_linear({{0, 0}, {0.5, 0.25}, {1, 1}}).scaled(2.0);
    CHECK(pl.cdf(1.0) == Approx(0.25));
    CHECK(pl.upper() == Approx(2.0));
}

TEST_CASE("invalid valuation laws are rejected") {
    CHECK_THROWS_AS(ValuationDistribution::uniform(1, 1), ConfigError);
    CHECK_THROWS_AS(ValuationDistribution::uniform(-1, 1), ConfigError);
    CHECK_THROWS_AS(ValuationDistribution::exponential(0), ConfigError);
    CHECK_THROWS_AS(ValuationDistribution::piecewise_linear({{0, 0}, {1, 0.5}}), ConfigError);
    CHECK_THROWS_AS(ValuationDistribution::piecewise_linear({{0, 0}, {1, 0.6}, {0.5, 1}}), ConfigError);
}

TEST_CASE("valuation samples follow the cdf") {
    RandomStream rng(11);
    const auto d = ValuationDistribution::piecewise_linear({{0, 0}, {0.5, 0.25}, {1, 1}});
    int below = 0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) below += d.sample(rng) <= 0.5;
    CHECK(below / double(n) == Approx(0.25).epsilon(0.02));
}

TEST_CASE("duration laws: means, rates and sampler means") {
    const std::vector<DurationDistribution> laws = {DurationDistribution::exponential(2.0),
                                                    DurationDistribution::deterministic(0.7),
                                                    DurationDistribution::empirical({0.2, 1.0, 3.1, 0.45})};
    const std::vector<double> means = {0.5, 0.7, (0.2 + 1.0 + 3.1 + 0.45) / 4};
    for (std::size_t i = 0; i < laws.size(); ++i) {
        CHECK(laws[i].mean() == Approx(means[i]));
        CHECK(laws[i].rate() == Approx(1 / means[i]));
        RandomStream rng(3, 0, i);
        double sum = 0;
        const int n = 1000000;
        for (int k = 0; k < n; ++k) sum += laws[i].sample(rng);
        CHECK(std::abs(sum / n - means[i]) <= 0.01 * means[i]);
    }
    CHECK_THROWS_AS(DurationDistribution::exponential(-1), ConfigError);
    CHECK_THROWS_AS(DurationDistribution::deterministic(0), ConfigError);
    CHECK_THROWS_AS(DurationDistribution::empirical({}), ConfigError);
}

TEST_CASE("expected minimum with an exponential horizon") {
    CHECK(DurationDistribution::exponential(1).expected_min_with_exponential(1) == Approx(0.5));
    CHECK(DurationDistribution::exponential(2).expected_min_with_exponential(1) == Approx(1.0 / 3));
    CHECK(DurationDistribution::deterministic(1e9).expected_min_with_exponential(1) == Approx(1.0));
    CHECK(DurationDistribution::deterministic(2).expected_min_with_exponential(0.5) ==
          Approx((1 - std::exp(-1.0)) / 0.5));
    const auto emp = DurationDistribution::empirical({1.0, 3.0});
    CHECK(emp.expected_min_with_exponential(2.0) ==
          Approx(0.5 * ((1 - std::exp(-2.0)) / 2 + (1 - std::exp(-6.0)) / 2)));
}

TEST_CASE("time scaling stretches durations") {
    CHECK(DurationDistribution::exponential(2).time_scaled(2).mean() == Approx(1.0));
    CHECK(DurationDistribution::deterministic(0.5).time_scaled(3).mean() == Approx(1.5));
    CHECK(DurationDistribution::empirical({1, 2}).time_scaled(0.5).mean() == Approx(0.75));
}

TEST_CASE("random streams are reproducible and distinct") {
    RandomStream a(5, 1, 2), b(5, 1, 2), c(5, 1, 3), d(5, 2, 2);
    const auto x = a.next_u64();
    CHECK(x == b.next_u64());
    CHECK(x != c.next_u64());
    CHECK(x != d.next_u64());
    CHECK(derive_seed(1, 0, 0) != derive_seed(1, 0, 1));
}

}  // TEST_SUITE
