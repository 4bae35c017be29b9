#include "odp/dispatch.hpp"

#include "odp/error.hpp"

namespace odp {

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::loss: return "loss";
        case ModelKind::discounted: return "discounted";
        case ModelKind::mixture: return "mixture";
        case ModelKind::queue: return "queue";
        case ModelKind::hybrid: return "hybrid";
        case ModelKind::competition: return "competition";
    }
    return "unknown";
}

ModelKind classify(const Scenario& s) {
    if (s.workers.size() > 1) return ModelKind::competition;
    if (s.queue_capacity == 1) return ModelKind::queue;
    if (s.has_patient_class()) return ModelKind::hybrid;
    if (std::holds_alternative<MixtureDiscount>(s.discount)) return ModelKind::mixture;
    if (std::holds_alternative<ExponentialDiscount>(s.discount)) return ModelKind::discounted;
    return ModelKind::loss;
}

AnalyticResult solve_scenario(const Scenario& scenario, const CoordinateSearchOptions& search) {
    scenario.validate();
    AnalyticResult out;
    out.kind = classify(scenario);

    if (out.kind == ModelKind::competition) {
        if (scenario.queue_capacity != 0 || scenario.is_discounted() || scenario.has_patient_class())
            throw ModelMismatch("competing workers are modelled as undiscounted loss systems");
        out.equilibrium = bica_equilibrium(scenario);
        out.prices.assign(scenario.workers.size(), {});
        for (const auto& w : out.equilibrium->workers) {
            out.value += w.rate;
            for (std::size_t j = 0; j < scenario.workers.size(); ++j)
                if (scenario.workers[j].rank == w.rank) out.prices[j] = w.prices;
        }
        return out;
    }

    const Scenario net = net_scenario(scenario);
    const double retention = scenario.workers.front().commission_retention;
    PriceVector prices;
    switch (out.kind) {
        case ModelKind::loss:
            out.solution = solve_fixed_point(net);
            prices = out.solution->prices;
            out.value = out.solution->rate;
            break;
        case ModelKind::discounted:
            out.solution = solve_discounted(net);
            prices = out.solution->prices;
            out.value = *out.solution->discounted_value;
            break;
        case ModelKind::mixture: {
            const PriceOptimum m = mixture_horizon_optimize(net, search);
            prices = m.prices;
            out.value = m.value;
            break;
        }
        case ModelKind::queue: {
            const TwoPriceOptimum q = queue_optimize(QueueInstance::from_scenario(net), search);
            prices = {q.price_a, q.price_b};
            out.value = q.value;
            break;
        }
        case ModelKind::hybrid: {
            out.hybrid = hybrid_solve(net);
            const auto& h = *out.hybrid;
            for (const auto& c : net.classes) {
                if (c.patience == Patience::on_demand) {
                    prices.push_back(h.price_on_demand);
                    const double load = c.load() * c.valuation.tail(h.price_on_demand);
                    out.value += load * (h.price_on_demand - net.cost()) / (1.0 + load);
                } else if (h.price_patient) {
                    prices.push_back(*h.price_patient);
                    out.value += c.load() * c.valuation.tail(*h.price_patient) * (*h.price_patient - net.cost());
                } else {
                    prices.push_back(c.valuation.upper());
                }
            }
            break;
        }
        case ModelKind::competition: break;
    }
    for (double& p : prices) p /= retention;
    out.prices = {prices};
    return out;
}

}  // namespace odp
