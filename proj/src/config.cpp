#include "odp/config.hpp"

#include <fstream>
#include <initializer_list>
#include <set>

#include "odp/error.hpp"

namespace odp {

using nlohmann::json;

namespace {

void only_keys(const json& obj, const std::string& at, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) throw ConfigError(at, "expected an object");
    std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [key, _] : obj.items()) {
        if (!ok.count(key)) throw ConfigError(at + "/" + key, "unknown key");
    }
}

const json& field(const json& obj, const std::string& at, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end()) throw ConfigError(at + "/" + key, "missing required key");
    return *it;
}

double number(const json& obj, const std::string& at, const char* key) {
    const json& v = field(obj, at, key);
    if (!v.is_number()) throw ConfigError(at + "/" + key, "expected a number");
    return v.get<double>();
}

double number_or(const json& obj, const std::string& at, const char* key, double fallback) {
    return obj.contains(key) ? number(obj, at, key) : fallback;
}

std::string text(const json& obj, const std::string& at, const char* key) {
    const json& v = field(obj, at, key);
    if (!v.is_string()) throw ConfigError(at + "/" + key, "expected a string");
    return v.get<std::string>();
}

// Re-raises construction errors of distributions under the config key path.
template <class F>
auto at_path(const std::string& at, F&& make) {
    try {
        return make();
    } catch (const ConfigError& e) {
        if (!e.path().empty() && e.path().front() == '/') throw;
        throw ConfigError(e.path().empty() ? at : at + "/" + e.path(), e.detail());
    }
}

DurationDistribution parse_duration(const json& j, const std::string& at) {
    only_keys(j, at, {"kind", "params"});
    const std::string kind = text(j, at, "kind");
    const json& params = field(j, at, "params");
    const std::string pat = at + "/params";
    if (kind == "exponential") {
        only_keys(params, pat, {"rate"});
        return at_path(pat, [&] { return DurationDistribution::exponential(number(params, pat, "rate")); });
    }
    if (kind == "deterministic") {
        only_keys(params, pat, {"value"});
        return at_path(pat, [&] { return DurationDistribution::deterministic(number(params, pat, "value")); });
    }
    if (kind == "empirical") {
        only_keys(params, pat, {"samples"});
        const json& s = field(params, pat, "samples");
        if (!s.is_array()) throw ConfigError(pat + "/samples", "expected an array of numbers");
        std::vector<double> samples;
        for (const auto& x : s) {
            if (!x.is_number()) throw ConfigError(pat + "/samples", "expected an array of numbers");
            samples.push_back(x.get<double>());
        }
        return at_path(pat, [&] { return DurationDistribution::empirical(std::move(samples)); });
    }
    throw ConfigError(at + "/kind", "unknown duration kind '" + kind + "'");
}

ValuationDistribution parse_valuation(const json& j, const std::string& at) {
    only_keys(j, at, {"kind", "params"});
    const std::string kind = text(j, at, "kind");
    const json& params = field(j, at, "params");
    const std::string pat = at + "/params";
    if (kind == "uniform") {
        only_keys(params, pat, {"low", "high"});
        return at_path(pat, [&] {
            return ValuationDistribution::uniform(number_or(params, pat, "low", 0.0), number(params, pat, "high"));
        });
    }
    if (kind == "exponential") {
        only_keys(params, pat, {"rate"});
        return at_path(pat, [&] { return ValuationDistribution::exponential(number(params, pat, "rate")); });
    }
    if (kind == "piecewise_linear") {
        only_keys(params, pat, {"knots"});
        const json& k = field(params, pat, "knots");
        if (!k.is_array()) throw ConfigError(pat + "/knots", "expected an array of [x, F] pairs");
        std::vector<std::pair<double, double>> knots;
        for (std::size_t i = 0; i < k.size(); ++i) {
            const json& pair = k[i];
            if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number())
                throw ConfigError(pat + "/knots/" + std::to_string(i), "expected [x, F]");
            knots.emplace_back(pair[0].get<double>(), pair[1].get<double>());
        }
        return at_path(pat, [&] { return ValuationDistribution::piecewise_linear(std::move(knots)); });
    }
    throw ConfigError(at + "/kind", "unknown valuation kind '" + kind + "'");
}

Discount parse_discount(const json& j, const std::string& at) {
    only_keys(j, at, {"kind", "params"});
    const std::string kind = text(j, at, "kind");
    if (kind == "none") return NoDiscount{};
    const json& params = field(j, at, "params");
    const std::string pat = at + "/params";
    if (kind == "exponential") {
        only_keys(params, pat, {"rate"});
        return ExponentialDiscount{number(params, pat, "rate")};
    }
    if (kind == "mixture") {
        only_keys(params, pat, {"components"});
        const json& comps = field(params, pat, "components");
        if (!comps.is_array()) throw ConfigError(pat + "/components", "expected an array");
        MixtureDiscount m;
        for (std::size_t i = 0; i < comps.size(); ++i) {
            const std::string cat = pat + "/components/" + std::to_string(i);
            only_keys(comps[i], cat, {"weight", "rate"});
            m.components.push_back({number(comps[i], cat, "weight"), number(comps[i], cat, "rate")});
        }
        return m;
    }
    throw ConfigError(at + "/kind", "unknown discount kind '" + kind + "'");
}

json duration_to_json(const DurationDistribution& d) {
    return std::visit(
        [](const auto& law) -> json {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, ExponentialDuration>)
                return {{"kind", "exponential"}, {"params", {{"rate", law.rate}}}};
            else if constexpr (std::is_same_v<T, DeterministicDuration>)
                return {{"kind", "deterministic"}, {"params", {{"value", law.value}}}};
            else
                return {{"kind", "empirical"}, {"params", {{"samples", law.samples}}}};
        },
        d.law());
}

json valuation_to_json(const ValuationDistribution& v) {
    return std::visit(
        [](const auto& law) -> json {
            using T = std::decay_t<decltype(law)>;
            if constexpr (std::is_same_v<T, UniformValuation>)
                return {{"kind", "uniform"}, {"params", {{"low", law.low}, {"high", law.high}}}};
            else if constexpr (std::is_same_v<T, ExponentialValuation>)
                return {{"kind", "exponential"}, {"params", {{"rate", law.rate}}}};
            else {
                json knots = json::array();
                for (const auto& [x, f] : law.knots) knots.push_back({x, f});
                return {{"kind", "piecewise_linear"}, {"params", {{"knots", knots}}}};
            }
        },
        v.law());
}

}  // namespace

Scenario scenario_from_json(const json& doc) {
    only_keys(doc, "", {"classes", "workers", "discount", "queue_capacity", "choice_rule"});
    Scenario s;

    const json& classes = field(doc, "", "classes");
    if (!classes.is_array()) throw ConfigError("/classes", "expected an array");
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const std::string at = "/classes/" + std::to_string(k);
        const json& c = classes[k];
        only_keys(c, at, {"name", "arrival_rate", "duration", "valuation", "patience"});
        CustomerClass cls;
        cls.name = c.contains("name") ? text(c, at, "name") : std::string(1, static_cast<char>('A' + k % 26));
        cls.arrival_rate = number(c, at, "arrival_rate");
        cls.duration = parse_duration(field(c, at, "duration"), at + "/duration");
        cls.valuation = parse_valuation(field(c, at, "valuation"), at + "/valuation");
        if (c.contains("patience")) {
            const std::string p = text(c, at, "patience");
            if (p == "on_demand")
                cls.patience = Patience::on_demand;
            else if (p == "patient")
                cls.patience = Patience::patient;
            else
                throw ConfigError(at + "/patience", "expected 'on_demand' or 'patient'");
        }
        s.classes.push_back(std::move(cls));
    }

    const json& workers = field(doc, "", "workers");
    if (!workers.is_array()) throw ConfigError("/workers", "expected an array");
    s.workers.clear();
    for (std::size_t i = 0; i < workers.size(); ++i) {
        const std::string at = "/workers/" + std::to_string(i);
        const json& w = workers[i];
        only_keys(w, at, {"cost", "rank", "commission_retention"});
        WorkerSpec spec;
        spec.cost = number_or(w, at, "cost", 0.0);
        const double rank = number_or(w, at, "rank", static_cast<double>(i + 1));
        if (rank != static_cast<int>(rank)) throw ConfigError(at + "/rank", "expected an integer");
        spec.rank = static_cast<int>(rank);
        spec.commission_retention = number_or(w, at, "commission_retention", 1.0);
        s.workers.push_back(spec);
    }

    if (doc.contains("discount")) s.discount = parse_discount(doc["discount"], "/discount");
    if (doc.contains("queue_capacity")) {
        const json& q = doc["queue_capacity"];
        if (!q.is_number_integer()) throw ConfigError("/queue_capacity", "expected an integer");
        s.queue_capacity = q.get<int>();
    }
    if (doc.contains("choice_rule")) {
        const std::string rule = text(doc, "", "choice_rule");
        if (rule == "bica")
            s.choice_rule = ChoiceRule::bica;
        else if (rule == "cheapest")
            s.choice_rule = ChoiceRule::cheapest;
        else
            throw ConfigError("/choice_rule", "expected 'bica' or 'cheapest'");
    }
    s.validate();
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path.string() + "'");
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("", std::string("invalid JSON: ") + e.what());
    }
    return scenario_from_json(doc);
}

json scenario_to_json(const Scenario& s) {
    json classes = json::array();
    for (const auto& c : s.classes) {
        classes.push_back({{"name", c.name},
                           {"arrival_rate", c.arrival_rate},
                           {"duration", duration_to_json(c.duration)},
                           {"valuation", valuation_to_json(c.valuation)},
                           {"patience", c.patience == Patience::patient ? "patient" : "on_demand"}});
    }
    json workers = json::array();
    for (const auto& w : s.workers)
        workers.push_back({{"cost", w.cost}, {"rank", w.rank}, {"commission_retention", w.commission_retention}});
    json discount = std::visit(
        [](const auto& d) -> json {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, NoDiscount>)
                return {{"kind", "none"}};
            else if constexpr (std::is_same_v<T, ExponentialDiscount>)
                return {{"kind", "exponential"}, {"params", {{"rate", d.rate}}}};
            else {
                json comps = json::array();
                for (const auto& c : d.components) comps.push_back({{"weight", c.weight}, {"rate", c.rate}});
                return {{"kind", "mixture"}, {"params", {{"components", comps}}}};
            }
        },
        s.discount);
    return {{"classes", classes},
            {"workers", workers},
            {"discount", discount},
            {"queue_capacity", s.queue_capacity},
            {"choice_rule", s.choice_rule == ChoiceRule::cheapest ? "cheapest" : "bica"}};
}

}  // namespace odp
