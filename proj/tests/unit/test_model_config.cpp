#include <cmath>
#include <fstream>

#include "doctest.h"
#include "helpers.hpp"
#include "odp/config.hpp"
#include "odp/error.hpp"
#include "odp/revenue.hpp"

using namespace odp;
using namespace odp::test;
using doctest::Approx;
using nlohmann::json;

namespace {

json base_doc() {
    return json::parse(R"({
      "classes": [{"name": "A", "arrival_rate": 2.0,
                   "duration": {"kind": "exponential", "params": {"rate": 4.0}},
                   "valuation": {"kind": "uniform", "params": {"low": 0.0, "high": 1.0}}}],
      "workers": [{"cost": 0.1, "rank": 1, "commission_retention": 0.9}]
    })");
}

std::string error_path(const json& doc) {
    try {
        scenario_from_json(doc);
    } catch (const ConfigError& e) {
        return e.path();
    }
    return "<no error>";
}

}  // namespace

TEST_SUITE("model") {

TEST_CASE("class load and service rate") {
    const auto c = exp_class(2.0, 4.0, ValuationDistribution::uniform(0, 1));
    CHECK(c.load() == Approx(0.5));
    CHECK(c.service_rate() == Approx(4.0));
}

TEST_CASE("commission rescales the valuation law") {
    const WorkerSpec full{0, 1, 1.0}, keep80{0, 1, 0.8}, half{0, 1, 0.5};
    const auto u1 = exp_class(1, 1, ValuationDistribution::uniform(0, 1));
    CHECK(apply_commission(full, u1).valuation == u1.valuation);
    CHECK(apply_commission(keep80, u1).valuation == ValuationDistribution::uniform(0, 0.8));
    const auto u2 = exp_class(1, 1, ValuationDistribution::uniform(0, 2));
    CHECK(apply_commission(half, u2).valuation == ValuationDistribution::uniform(0, 1));
    const auto net = apply_commission(keep80, u1);
    for (double p : {0.1, 0.4, 0.7}) CHECK(net.valuation.tail(p) == Approx(u1.valuation.tail(p / 0.8)));
}

TEST_CASE("net-rate functional equals the gross functional at corresponding prices") {
    Scenario s = two_class_example();
    s.workers.front().commission_retention = 0.75;
    s.workers.front().cost = 0.05;
    const Scenario net = net_scenario(s);
    const LossProblem gross_problem = loss_problem(s);
    for (double a = 0.0; a <= 1.0; a += 0.05) {
        for (double b = 0.0; b <= 2.0; b += 0.1) {
            const std::vector<double> gross = {a, b};
            const std::vector<double> netp = {0.75 * a, 0.75 * b};
            // Worker's net rate computed directly from gross prices and original valuations.
            double num = 0, den = 1;
            for (std::size_t k = 0; k < 2; ++k) {
                const double w = gross_problem.loads[k] * s.classes[k].valuation.tail(gross[k]);
                num += w * (0.75 * gross[k] - 0.05);
                den += w;
            }
            REQUIRE(avg_earning_rate(net, netp) == Approx(num / den).epsilon(1e-12));
        }
    }
}

TEST_CASE("per-job price") {
    const auto unit = exp_class(1, 1, ValuationDistribution::uniform(0, 1));
    CHECK(per_job_price(0.7029, unit) == Approx(0.7029));
    CHECK(per_job_price(0.5, exp_class(1, 0.5, ValuationDistribution::uniform(0, 1))) == Approx(1.0));
    CHECK(per_job_price(2 - kSqrt2, exp_class(1, 2, ValuationDistribution::uniform(0, 1))) ==
          Approx((2 - kSqrt2) / 2));
}

TEST_CASE("scenario validation") {
    Scenario s = two_class_example();
    CHECK_NOTHROW(s.validate());
    s.discount = MixtureDiscount{{{0.5, 1.0}, {0.4, 2.0}}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.discount = MixtureDiscount{{{0.5, 1.0}, {0.5, 2.0}}};
    CHECK_NOTHROW(s.validate());
    s.discount = ExponentialDiscount{0.0};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.discount = NoDiscount{};
    s.workers = {WorkerSpec{0, 1, 1}, WorkerSpec{0, 1, 1}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.choice_rule = ChoiceRule::cheapest;
    CHECK_NOTHROW(s.validate());
    s.workers = {WorkerSpec{-1, 1, 1}};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    s.workers = {};
    CHECK_THROWS_AS(s.validate(), ConfigError);
    Scenario empty;
    empty.classes.clear();
    CHECK_THROWS_AS(empty.validate(), ConfigError);
}

TEST_CASE("load scaling leaves the earning functional unchanged") {
    Scenario s = two_class_example();
    Scenario scaled = s;
    for (auto& c : scaled.classes) {
        c.arrival_rate *= 3.7;
        c.duration = c.duration.time_scaled(1 / 3.7);
    }
    for (double a = 0; a <= 1; a += 0.1)
        for (double b = 0; b <= 2; b += 0.2) {
            const std::vector<double> p = {a, b};
            REQUIRE(avg_earning_rate(scaled, p) == Approx(avg_earning_rate(s, p)).epsilon(1e-12));
        }
}

}  // TEST_SUITE

TEST_SUITE("config") {

TEST_CASE("round trip through JSON") {
    const Scenario s = scenario_from_json(base_doc());
    CHECK(s.classes.size() == 1);
    CHECK(s.classes[0].arrival_rate == 2.0);
    CHECK(s.classes[0].load() == Approx(0.5));
    CHECK(s.workers[0].commission_retention == 0.9);
    const Scenario back = scenario_from_json(scenario_to_json(s));
    CHECK(scenario_to_json(back) == scenario_to_json(s));
}

TEST_CASE("all distribution and discount kinds parse") {
    json doc = base_doc();
    doc["classes"].push_back(json::parse(R"({"arrival_rate": 1,
        "duration": {"kind": "deterministic", "params": {"value": 0.5}},
        "valuation": {"kind": "exponential", "params": {"rate": 2}}, "patience": "patient"})"));
    doc["classes"].push_back(json::parse(R"({"arrival_rate": 1,
        "duration": {"kind": "empirical", "params": {"samples": [0.5, 1.5]}},
        "valuation": {"kind": "piecewise_linear", "params": {"knots": [[0,0],[0.5,0.25],[1,1]]}}})"));
    doc["discount"] = json::parse(R"({"kind": "mixture", "params": {"components": [
        {"weight": 0.25, "rate": 1}, {"weight": 0.75, "rate": 3}]}})");
    doc["queue_capacity"] = 0;
    const Scenario s = scenario_from_json(doc);
    CHECK(s.classes.size() == 3);
    CHECK(s.classes[1].patience == Patience::patient);
    CHECK(s.classes[2].duration.mean() == Approx(1.0));
    CHECK(std::get<MixtureDiscount>(s.discount).components.size() == 2);
    CHECK(scenario_to_json(scenario_from_json(scenario_to_json(s))) == scenario_to_json(s));
}

TEST_CASE("errors carry key paths") {
    json doc = base_doc();
    doc["classes"][0]["arival_rate"] = 1.0;
    CHECK(error_path(doc) == "/classes/0/arival_rate");

    doc = base_doc();
    doc["classes"][0]["valuation"]["params"]["high"] = "one";
    CHECK(error_path(doc) == "/classes/0/valuation/params/high");

    doc = base_doc();
    doc["classes"][0]["duration"]["kind"] = "lognormal";
    CHECK(error_path(doc) == "/classes/0/duration/kind");

    doc = base_doc();
    doc["workers"][0]["commission_retention"] = 1.5;
    CHECK(error_path(doc).find("/workers/0/commission_retention") != std::string::npos);

    doc = base_doc();
    doc["extra"] = 1;
    CHECK(error_path(doc) == "/extra");

    doc = base_doc();
    doc["queue_capacity"] = 2;
    CHECK(error_path(doc) == "/queue_capacity");

    doc = base_doc();
    doc.erase("classes");
    CHECK(error_path(doc) == "/classes");
}

TEST_CASE("loading files") {
    CHECK_THROWS_AS(load_scenario("/nonexistent/scenario.json"), ConfigError);
    const std::string path = "odp_config_test.json";
    {
        std::ofstream out(path);
        out << "{ not json";
    }
    CHECK_THROWS_AS(load_scenario(path), ConfigError);
    {
        std::ofstream out(path);
        out << base_doc().dump();
    }
    CHECK(load_scenario(path).classes.size() == 1);
    std::remove(path.c_str());
}

}  // TEST_SUITE
