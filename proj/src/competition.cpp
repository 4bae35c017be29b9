#include "odp/competition.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "odp/error.hpp"
#include "odp/optimizer.hpp"
#include "odp/revenue.hpp"
#include "odp/search.hpp"

namespace odp {

namespace {

std::vector<std::size_t> rank_order(const std::vector<WorkerSpec>& workers) {
    std::vector<std::size_t> order(workers.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return workers[a].rank < workers[b].rank; });
    return order;
}

double busy_from_demand(const std::vector<ResidualDemandCurve>& demand, const std::vector<CustomerClass>& classes,
                        std::span<const double> prices) {
    double w = 0.0;
    for (std::size_t k = 0; k < classes.size(); ++k) w += demand[k].rate(prices[k]) * classes[k].duration.mean();
    return w / (1.0 + w);
}

std::vector<ResidualDemandCurve> residual_curves(const std::vector<CustomerClass>& classes,
                                                 const std::vector<WorkerEquilibrium>& upstream) {
    std::vector<ResidualDemandCurve> curves;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        std::vector<UpstreamWorker> up;
        for (const auto& w : upstream) up.push_back({w.prices[k], w.busy_fraction});
        curves.push_back(residual_demand(classes[k], std::move(up)));
    }
    return curves;
}

}  // namespace

double busy_fraction(const Scenario& single_worker, std::span<const double> prices) {
    if (single_worker.queue_capacity != 0) throw ModelMismatch("busy fraction formula models a loss system");
    return loss_busy_fraction(loss_problem(single_worker), prices);
}

ResidualDemandCurve::ResidualDemandCurve(double arrival_rate, ValuationDistribution valuation,
                                         std::vector<UpstreamWorker> upstream)
    : arrival_rate_(arrival_rate), valuation_(std::move(valuation)), upstream_(std::move(upstream)) {
    for (const auto& u : upstream_) {
        if (!(u.busy >= 0.0 && u.busy <= 1.0)) throw ModelMismatch("upstream busy fraction must lie in [0, 1]");
    }
    std::stable_sort(upstream_.begin(), upstream_.end(),
                     [](const UpstreamWorker& a, const UpstreamWorker& b) { return a.price < b.price; });
}

double ResidualDemandCurve::rate(double price) const { return arrival_rate_ * share(price); }

double ResidualDemandCurve::share(double price) const {
    // Pass-through probability is piecewise constant in the valuation: the product of the busy
    // fractions of every upstream worker the customer can afford.
    double mass = 0.0;
    double pass = 1.0;
    double seg_lo = 0.0;
    for (std::size_t j = 0; j <= upstream_.size(); ++j) {
        const bool last = j == upstream_.size();
        const double seg_hi = last ? std::numeric_limits<double>::infinity() : upstream_[j].price;
        if (seg_hi > price) {
            const double from = std::max(price, seg_lo);
            const double upper_tail = last ? 0.0 : valuation_.tail(seg_hi);
            mass += pass * (valuation_.tail(from) - upper_tail);
        }
        if (!last) {
            pass *= upstream_[j].busy;
            seg_lo = seg_hi;
        }
    }
    return mass;
}

ResidualDemandCurve residual_demand(const CustomerClass& cls, double upstream_price, double upstream_busy) {
    return residual_demand(cls, std::vector<UpstreamWorker>{{upstream_price, upstream_busy}});
}

ResidualDemandCurve residual_demand(const CustomerClass& cls, std::vector<UpstreamWorker> upstream) {
    return ResidualDemandCurve(cls.arrival_rate, cls.valuation, std::move(upstream));
}

double residual_rate(const std::vector<ResidualDemandCurve>& demand, const std::vector<CustomerClass>& classes,
                     const WorkerSpec& worker, std::span<const double> prices) {
    double num = 0.0;
    double den = 1.0;
    for (std::size_t k = 0; k < classes.size(); ++k) {
        const double w = demand[k].rate(prices[k]) * classes[k].duration.mean();
        num += w * (worker.commission_retention * prices[k] - worker.cost);
        den += w;
    }
    return num / den;
}

WorkerEquilibrium best_residual_prices(const std::vector<ResidualDemandCurve>& demand,
                                       const std::vector<CustomerClass>& classes, const WorkerSpec& worker) {
    const std::size_t K = classes.size();
    WorkerEquilibrium out;
    out.rank = worker.rank;
    out.prices.assign(K, 0.0);
    double r = 0.0;
    for (int it = 0; it < 1000; ++it) {
        for (std::size_t k = 0; k < K; ++k) {
            auto objective = [&](double p) {
                return (worker.commission_retention * p - worker.cost - r) * demand[k].share(p);
            };
            out.prices[k] = grid_golden_max(objective, 0.0, classes[k].valuation.upper(), kResidualGridPoints).x;
        }
        const double next = residual_rate(demand, classes, worker, out.prices);
        if (!std::isfinite(next)) throw NonFiniteRate("residual earning rate is not finite");
        const bool done = std::abs(next - r) <= 1e-13;
        r = next;
        if (done) break;
    }
    out.rate = r;
    out.busy_fraction = busy_from_demand(demand, classes, out.prices);
    return out;
}

EquilibriumProfile bica_equilibrium(const Scenario& scenario) {
    scenario.validate();
    if (scenario.choice_rule != ChoiceRule::bica)
        throw NoEquilibrium("no pure price equilibrium exists among undifferentiated workers");
    if (scenario.queue_capacity != 0) throw ModelMismatch("competition model assumes loss-system workers");
    const auto order = rank_order(scenario.workers);

    EquilibriumProfile profile;
    for (std::size_t pos = 0; pos < order.size(); ++pos) {
        const WorkerSpec& w = scenario.workers[order[pos]];
        if (pos == 0) {
            Scenario own = scenario;
            own.workers = {w};
            own.discount = NoDiscount{};
            const OptimalSolution sol = solve_fixed_point(net_scenario(own));
            WorkerEquilibrium top;
            top.rank = w.rank;
            for (double net : sol.prices) top.prices.push_back(net / w.commission_retention);
            top.rate = sol.rate;
            top.busy_fraction = busy_fraction(own, top.prices);
            profile.workers.push_back(std::move(top));
        } else {
            const auto curves = residual_curves(scenario.classes, profile.workers);
            profile.workers.push_back(best_residual_prices(curves, scenario.classes, w));
        }
    }
    return profile;
}

// ---------------------------------------------------------------------------

std::vector<double> ctmc_worker_rates(const Scenario& s, std::span<const double> prices) {
    if (s.classes.size() != 1) throw ModelMismatch("busy-set chain is implemented for a single class");
    const std::size_t n = s.workers.size();
    if (n > 12) throw ModelMismatch("busy-set chain supports at most 12 workers");
    if (prices.size() != n) throw ModelMismatch("one price per worker expected");
    const CustomerClass& c = s.classes.front();
    const double lambda = c.arrival_rate;
    const double mu = c.service_rate();
    const auto order = rank_order(s.workers);
    const std::size_t states = std::size_t{1} << n;

    Eigen::MatrixXd q = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(states), static_cast<Eigen::Index>(states));
    for (std::size_t busy = 0; busy < states; ++busy) {
        const auto from = static_cast<Eigen::Index>(busy);
        for (std::size_t j = 0; j < n; ++j) {
            if (busy & (std::size_t{1} << j)) q(from, static_cast<Eigen::Index>(busy ^ (std::size_t{1} << j))) += mu;
        }
        if (s.choice_rule == ChoiceRule::bica) {
            double cap = std::numeric_limits<double>::infinity();  // min price over idle higher ranks
            for (std::size_t j : order) {
                if (busy & (std::size_t{1} << j)) continue;
                if (prices[j] < cap) {
                    const double hi_tail = std::isinf(cap) ? 0.0 : c.valuation.tail(cap);
                    const double r = lambda * (c.valuation.tail(prices[j]) - hi_tail);
                    if (r > 0.0) q(from, static_cast<Eigen::Index>(busy | (std::size_t{1} << j))) += r;
                    cap = prices[j];
                }
            }
        } else {
            double lowest = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < n; ++j)
                if (!(busy & (std::size_t{1} << j))) lowest = std::min(lowest, prices[j]);
            if (std::isfinite(lowest)) {
                std::vector<std::size_t> ties;
                for (std::size_t j = 0; j < n; ++j)
                    if (!(busy & (std::size_t{1} << j)) && prices[j] == lowest) ties.push_back(j);
                const double r = lambda * c.valuation.tail(lowest) / static_cast<double>(ties.size());
                for (std::size_t j : ties)
                    if (r > 0.0) q(from, static_cast<Eigen::Index>(busy | (std::size_t{1} << j))) += r;
            }
        }
        q(from, from) = -q.row(from).sum();
    }

    // pi Q = 0 with sum(pi) = 1: replace one balance equation by the normalisation.
    Eigen::MatrixXd a = q.transpose();
    a.row(a.rows() - 1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(a.rows());
    b(b.size() - 1) = 1.0;
    const Eigen::VectorXd pi = a.fullPivLu().solve(b);

    std::vector<double> rates(n, 0.0);
    for (std::size_t busy = 0; busy < states; ++busy) {
        for (std::size_t j = 0; j < n; ++j) {
            if (busy & (std::size_t{1} << j))
                rates[j] += pi(static_cast<Eigen::Index>(busy)) *
                            (s.workers[j].commission_retention * prices[j] - s.workers[j].cost);
        }
    }
    return rates;
}

namespace {

std::vector<double> residual_model_rates(const Scenario& s, std::span<const double> prices) {
    const auto order = rank_order(s.workers);
    std::vector<double> rates(s.workers.size(), 0.0);
    std::vector<WorkerEquilibrium> upstream;
    for (std::size_t j : order) {
        const auto curves = residual_curves(s.classes, upstream);
        const std::vector<double> p{prices[j]};
        WorkerEquilibrium w;
        w.rank = s.workers[j].rank;
        w.prices = p;
        w.rate = residual_rate(curves, s.classes, s.workers[j], p);
        w.busy_fraction = busy_from_demand(curves, s.classes, p);
        rates[j] = w.rate;
        upstream.push_back(std::move(w));
    }
    return rates;
}

}  // namespace

DynamicsReport best_response_dynamics(const Scenario& s, const DynamicsOptions& options) {
    if (s.classes.size() != 1) throw ModelMismatch("best-response dynamics take a single class");
    if (options.model == RevenueModel::residual_approximation && s.choice_rule != ChoiceRule::bica)
        throw ModelMismatch("residual approximation is defined for ranked workers");
    const std::size_t n = s.workers.size();
    const ValuationDistribution& v = s.classes.front().valuation;

    std::vector<double> grid;
    for (int i = 0;; ++i) {
        const double p = i * options.grid_step;
        if (p > v.upper() + 1e-12) break;
        grid.push_back(std::min(p, v.upper()));
    }

    auto rates_at = [&](const std::vector<double>& prices) {
        return options.model == RevenueModel::exact_ctmc ? ctmc_worker_rates(s, prices)
                                                         : residual_model_rates(s, prices);
    };

    // Everyone starts at the single-worker optimum, rounded to the grid.
    std::vector<std::size_t> idx(n);
    {
        Scenario alone = s;
        alone.workers = {s.workers.front()};
        alone.discount = NoDiscount{};
        const double p = solve_fixed_point(alone).prices.front();
        const auto nearest = static_cast<std::size_t>(std::lround(p / options.grid_step));
        std::fill(idx.begin(), idx.end(), std::min(nearest, grid.size() - 1));
    }
    auto prices_of = [&](const std::vector<std::size_t>& ix) {
        std::vector<double> p(n);
        for (std::size_t j = 0; j < n; ++j) p[j] = grid[ix[j]];
        return p;
    };

    DynamicsReport report;
    std::map<std::vector<std::size_t>, int> seen;
    seen[idx] = 0;
    report.trajectory.push_back(prices_of(idx));

    const auto order = s.choice_rule == ChoiceRule::bica ? rank_order(s.workers) : [&] {
        std::vector<std::size_t> o(n);
        std::iota(o.begin(), o.end(), 0);
        return o;
    }();

    for (int round = 1; round <= options.rounds; ++round) {
        const auto before = idx;
        for (std::size_t j : order) {
            std::vector<double> p = prices_of(idx);
            double best = rates_at(p)[j];
            std::size_t best_i = idx[j];
            for (std::size_t i = 0; i < grid.size(); ++i) {
                p[j] = grid[i];
                const double r = rates_at(p)[j];
                if (r > best + 1e-14 * std::max(1.0, std::abs(best))) {
                    best = r;
                    best_i = i;
                }
            }
            idx[j] = best_i;
        }
        report.rounds = round;
        report.trajectory.push_back(prices_of(idx));
        if (idx == before) {
            report.fixed_point = true;
            break;
        }
        if (auto it = seen.find(idx); it != seen.end()) {
            report.cycle = true;
            report.cycle_start = it->second;
            report.cycle_length = round - it->second;
            break;
        }
        seen[idx] = round;
    }
    report.rates = rates_at(prices_of(idx));
    return report;
}

}  // namespace odp
