#include "odp/model.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "odp/error.hpp"

namespace odp {

double Scenario::total_load() const {
    double rho = 0.0;
    for (const auto& c : classes) rho += c.load();
    return rho;
}

double Scenario::total_arrival_rate() const {
    double lambda = 0.0;
    for (const auto& c : classes) lambda += c.arrival_rate;
    return lambda;
}

bool Scenario::has_patient_class() const {
    return std::any_of(classes.begin(), classes.end(),
                       [](const CustomerClass& c) { return c.patience == Patience::patient; });
}

void Scenario::validate() const {
    if (classes.empty()) throw ConfigError("/classes", "at least one class required");
    if (workers.empty()) throw ConfigError("/workers", "at least one worker required");
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const double lambda = classes[k].arrival_rate;
        if (!std::isfinite(lambda) || lambda < 0.0)
            throw ConfigError("/classes/" + std::to_string(k) + "/arrival_rate", "must be finite and >= 0");
    }
    std::set<int> ranks;
    for (std::size_t i = 0; i < workers.size(); ++i) {
        const auto& w = workers[i];
        const std::string at = "/workers/" + std::to_string(i);
        if (!std::isfinite(w.cost) || w.cost < 0.0) throw ConfigError(at + "/cost", "must be finite and >= 0");
        if (!(w.commission_retention > 0.0 && w.commission_retention <= 1.0))
            throw ConfigError(at + "/commission_retention", "must lie in (0, 1]");
        if (w.rank < 1) throw ConfigError(at + "/rank", "must be >= 1");
        if (choice_rule == ChoiceRule::bica && !ranks.insert(w.rank).second)
            throw ConfigError(at + "/rank", "ranks must be unique");
    }
    if (queue_capacity != 0 && queue_capacity != 1) throw ConfigError("/queue_capacity", "must be 0 or 1");
    if (const auto* e = std::get_if<ExponentialDiscount>(&discount)) {
        if (!(e->rate > 0.0) || !std::isfinite(e->rate)) throw ConfigError("/discount/params/rate", "must be > 0");
    }
    if (const auto* m = std::get_if<MixtureDiscount>(&discount)) {
        if (m->components.empty()) throw ConfigError("/discount/params/components", "must be non-empty");
        double total = 0.0;
        for (std::size_t i = 0; i < m->components.size(); ++i) {
            const auto& c = m->components[i];
            const std::string at = "/discount/params/components/" + std::to_string(i);
            if (!(c.weight > 0.0)) throw ConfigError(at + "/weight", "must be > 0");
            if (!(c.rate > 0.0) || !std::isfinite(c.rate)) throw ConfigError(at + "/rate", "must be > 0");
            total += c.weight;
        }
        if (std::abs(total - 1.0) > 1e-12) throw ConfigError("/discount/params/components", "weights must sum to 1");
    }
}

CustomerClass apply_commission(const WorkerSpec& worker, const CustomerClass& cls) {
    if (!(worker.commission_retention > 0.0 && worker.commission_retention <= 1.0))
        throw ConfigError("commission_retention", "must lie in (0, 1]");
    if (worker.commission_retention == 1.0) return cls;
    CustomerClass out = cls;
    out.valuation = cls.valuation.scaled(worker.commission_retention);
    return out;
}

Scenario net_scenario(const Scenario& scenario) {
    Scenario out = scenario;
    const WorkerSpec& w = scenario.workers.front();
    for (auto& c : out.classes) c = apply_commission(w, c);
    out.workers.front().commission_retention = 1.0;
    return out;
}

double per_job_price(double hourly_rate, const CustomerClass& cls) { return hourly_rate * cls.duration.mean(); }

Scenario single_class_scenario(double arrival_rate, double service_rate, ValuationDistribution valuation,
                               double cost) {
    Scenario s;
    s.classes.push_back(CustomerClass{"A", arrival_rate, DurationDistribution::exponential(service_rate),
                                      std::move(valuation), Patience::on_demand});
    s.workers = {WorkerSpec{cost, 1, 1.0}};
    return s;
}

}  // namespace odp
