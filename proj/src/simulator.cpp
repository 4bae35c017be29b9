#include "odp/simulator.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <thread>

#include "odp/error.hpp"
#include "odp/format.hpp"
#include "odp/rng.hpp"

namespace odp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Auxiliary stream ids sit above any realistic class count.
constexpr std::uint64_t kTieStream = 1u << 20;
constexpr std::uint64_t kHorizonStream = (1u << 20) + 1;
// Discounted paths stop once the discount factor falls below this.
constexpr double kDiscountCutoff = 1e-12;
constexpr std::size_t kMaxPathsPerReplication = 100000;

struct ReplicationResult {
    double value = 0.0;
    std::vector<double> worker_values;
    std::vector<double> worker_busy;
    EventCounts counts;
};

double overlap(double a0, double a1, double b0, double b1) { return std::max(0.0, std::min(a1, b1) - std::max(a0, b0)); }

class TraceLog {
public:
    explicit TraceLog(const std::optional<std::filesystem::path>& path) {
        if (path) {
            out_.open(*path);
            if (!out_) throw ConfigError("trace_path", "cannot open trace file '" + path->string() + "'");
            out_ << "time,event,class,worker,value\n";
        }
    }
    bool enabled() const { return out_.is_open(); }
    void write(double t, const char* event, std::size_t cls, long worker, double value) {
        if (out_.is_open()) out_ << exact_number(t) << ',' << event << ',' << cls << ',' << worker << ',' << exact_number(value) << '\n';
    }

private:
    std::ofstream out_;
};

// Per-class arrival source: each arrival consumes valuation, duration and the next gap, in that order.
struct ArrivalSource {
    const CustomerClass* cls;
    RandomStream rng;
    double next;

    ArrivalSource(const CustomerClass& c, std::uint64_t seed, std::uint64_t rep, std::uint64_t id)
        : cls(&c), rng(seed, rep, id), next(kInf) {
        restart(0.0);
    }
    void restart(double t) { next = cls->arrival_rate > 0.0 ? t + rng.exponential(cls->arrival_rate) : kInf; }
};

std::size_t earliest(const std::vector<ArrivalSource>& sources) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < sources.size(); ++k)
        if (sources[k].next < sources[best].next) best = k;
    return best;
}

std::vector<ArrivalSource> make_sources(const Scenario& s, std::uint64_t seed, std::uint64_t rep) {
    std::vector<ArrivalSource> src;
    src.reserve(s.classes.size());
    for (std::size_t k = 0; k < s.classes.size(); ++k) src.emplace_back(s.classes[k], seed, rep, k);
    return src;
}

std::vector<std::size_t> rank_order(const std::vector<WorkerSpec>& workers) {
    std::vector<std::size_t> order(workers.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return workers[a].rank < workers[b].rank; });
    return order;
}

// Worker chosen by an arriving customer, or -1. Sets `affordable` if any worker's price fits.
long choose_worker(const Scenario& s, const std::vector<PriceVector>& prices, const std::vector<std::size_t>& order,
                   const std::vector<double>& busy_until, std::size_t k, double valuation, double t,
                   RandomStream& ties, bool& affordable) {
    affordable = false;
    if (s.choice_rule == ChoiceRule::bica) {
        for (std::size_t j : order) {
            if (prices[j][k] > valuation) continue;
            affordable = true;
            if (busy_until[j] <= t) return static_cast<long>(j);
        }
        return -1;
    }
    double lowest = kInf;
    for (std::size_t j = 0; j < prices.size(); ++j) {
        if (prices[j][k] > valuation) continue;
        affordable = true;
        if (busy_until[j] <= t) lowest = std::min(lowest, prices[j][k]);
    }
    if (!std::isfinite(lowest)) return -1;
    std::vector<std::size_t> tied;
    for (std::size_t j = 0; j < prices.size(); ++j)
        if (busy_until[j] <= t && prices[j][k] == lowest) tied.push_back(j);
    if (tied.size() == 1) return static_cast<long>(tied.front());
    const auto pick = static_cast<std::size_t>(ties.uniform() * static_cast<double>(tied.size()));
    return static_cast<long>(tied[std::min(pick, tied.size() - 1)]);
}

void check_prices(const Scenario& s, const std::vector<PriceVector>& prices) {
    if (prices.size() != s.workers.size())
        throw ConfigError("prices", "expected prices for " + std::to_string(s.workers.size()) + " worker(s), got " +
                                        std::to_string(prices.size()));
    for (std::size_t j = 0; j < prices.size(); ++j) {
        if (prices[j].size() != s.classes.size())
            throw ConfigError("prices/" + std::to_string(j), "expected " + std::to_string(s.classes.size()) +
                                                                 " class prices, got " +
                                                                 std::to_string(prices[j].size()));
        for (double p : prices[j])
            if (!std::isfinite(p) || p < 0.0) throw ConfigError("prices/" + std::to_string(j), "prices must be >= 0");
    }
}

ReplicationResult run_loss(const SimConfig& cfg, const std::vector<PriceVector>& prices, std::size_t rep,
                           TraceLog* trace) {
    const Scenario& s = cfg.scenario;
    const double horizon = cfg.effective_horizon();
    const double warm = cfg.warmup_fraction * horizon;
    const std::size_t n = s.workers.size();
    auto sources = make_sources(s, cfg.seed, rep);
    RandomStream ties(cfg.seed, rep, kTieStream);
    const auto order = rank_order(s.workers);

    ReplicationResult out;
    out.worker_values.assign(n, 0.0);
    out.worker_busy.assign(n, 0.0);
    std::vector<double> busy_until(n, 0.0);

    for (;;) {
        const std::size_t k = earliest(sources);
        const double t = sources[k].next;
        if (!(t <= horizon)) break;
        ArrivalSource& src = sources[k];
        const double v = src.cls->valuation.sample(src.rng);
        const double d = src.cls->duration.sample(src.rng);
        src.restart(t);
        ++out.counts.arrivals;
        if (trace) trace->write(t, "arrival", k, -1, v);

        bool affordable = false;
        const long j = choose_worker(s, prices, order, busy_until, k, v, t, ties, affordable);
        if (j >= 0) {
            const auto w = static_cast<std::size_t>(j);
            ++out.counts.accepted;
            busy_until[w] = t + d;
            const double in_window = overlap(t, t + d, warm, horizon);
            const WorkerSpec& spec = s.workers[w];
            out.worker_values[w] += (spec.commission_retention * prices[w][k] - spec.cost) * in_window;
            out.worker_busy[w] += in_window;
            if (trace) trace->write(t, "accept", k, j, prices[w][k]);
        } else if (affordable) {
            ++out.counts.lost_busy;
            if (trace) trace->write(t, "lost_busy", k, -1, v);
        } else {
            ++out.counts.lost_price;
            if (trace) trace->write(t, "lost_price", k, -1, v);
        }
    }
    const double window = horizon - warm;
    for (std::size_t w = 0; w < n; ++w) {
        out.worker_values[w] /= window;
        out.worker_busy[w] /= window;
        out.value += out.worker_values[w];
    }
    return out;
}

ReplicationResult run_queue(const SimConfig& cfg, const PriceVector& prices, std::size_t rep, TraceLog* trace) {
    const Scenario& s = cfg.scenario;
    const double horizon = cfg.effective_horizon();
    const double warm = cfg.warmup_fraction * horizon;
    const WorkerSpec& spec = s.workers.front();
    auto sources = make_sources(s, cfg.seed, rep);

    ReplicationResult out;
    out.worker_values.assign(1, 0.0);
    out.worker_busy.assign(1, 0.0);

    double busy_until = 0.0;
    bool busy = false;
    bool waiting = false;
    std::size_t waiting_class = 0;
    double waiting_duration = 0.0;
    double earned = 0.0, busy_time = 0.0;

    auto start = [&](std::size_t k, double t, double d) {
        busy = true;
        busy_until = t + d;
        const double in_window = overlap(t, t + d, warm, horizon);
        earned += (spec.commission_retention * prices[k] - spec.cost) * in_window;
        busy_time += in_window;
        if (trace) trace->write(t, "start", k, 0, prices[k]);
    };

    for (;;) {
        const std::size_t k = earliest(sources);
        const double t = sources[k].next;
        if (!(t <= horizon)) break;
        // Completions up to and including t happen before the arrival.
        while (busy && busy_until <= t) {
            if (waiting) {
                waiting = false;
                start(waiting_class, busy_until, waiting_duration);
            } else {
                busy = false;
            }
        }
        ArrivalSource& src = sources[k];
        const double v = src.cls->valuation.sample(src.rng);
        const double d = src.cls->duration.sample(src.rng);
        src.restart(t);
        ++out.counts.arrivals;
        if (trace) trace->write(t, "arrival", k, -1, v);

        if (prices[k] > v) {
            ++out.counts.lost_price;
            if (trace) trace->write(t, "lost_price", k, -1, v);
        } else if (!busy) {
            ++out.counts.accepted;
            start(k, t, d);
        } else if (!waiting) {
            ++out.counts.accepted;
            waiting = true;
            waiting_class = k;
            waiting_duration = d;
            if (trace) trace->write(t, "queue", k, 0, prices[k]);
        } else {
            ++out.counts.lost_busy;
            if (trace) trace->write(t, "lost_busy", k, -1, v);
        }
    }
    // A job already waiting at the horizon may still start inside [warm, horizon].
    while (busy && busy_until <= horizon && waiting) {
        waiting = false;
        start(waiting_class, busy_until, waiting_duration);
    }
    const double window = horizon - warm;
    out.worker_values[0] = earned / window;
    out.worker_busy[0] = busy_time / window;
    out.value = out.worker_values[0];
    return out;
}

std::vector<MixtureComponent> horizon_components(const Scenario& s) {
    if (const auto* m = std::get_if<MixtureDiscount>(&s.discount)) return m->components;
    if (const auto* e = std::get_if<ExponentialDiscount>(&s.discount)) return {{1.0, e->rate}};
    throw ModelMismatch("discounted simulation needs a discounted scenario");
}

std::size_t discounted_paths(const SimConfig& cfg, double min_gamma) {
    const double per_path = cfg.scenario.total_arrival_rate() * (-std::log(kDiscountCutoff) / min_gamma);
    if (!(per_path > 0.0)) return 1;
    return std::clamp<std::size_t>(static_cast<std::size_t>(std::ceil(cfg.expected_arrivals / per_path)), 1,
                                   kMaxPathsPerReplication);
}

// `normalize`: each path contributes gamma times its discounted earnings.
ReplicationResult run_discounted(const SimConfig& cfg, const PriceVector& prices,
                                 const std::vector<MixtureComponent>& components, bool normalize, std::size_t paths,
                                 std::size_t rep, TraceLog* trace) {
    const Scenario& s = cfg.scenario;
    const WorkerSpec& spec = s.workers.front();
    auto sources = make_sources(s, cfg.seed, rep);
    RandomStream pick(cfg.seed, rep, kHorizonStream);

    ReplicationResult out;
    out.worker_values.assign(1, 0.0);
    out.worker_busy.assign(1, 0.0);
    double total = 0.0;

    for (std::size_t path = 0; path < paths; ++path) {
        double gamma = components.front().rate;
        if (components.size() > 1) {
            double u = pick.uniform();
            gamma = components.back().rate;
            for (const auto& c : components) {
                if (u < c.weight) {
                    gamma = c.rate;
                    break;
                }
                u -= c.weight;
            }
        }
        const double stop = -std::log(kDiscountCutoff) / gamma;
        for (auto& src : sources) src.restart(0.0);
        double busy_until = 0.0;
        double value = 0.0;
        for (;;) {
            const std::size_t k = earliest(sources);
            const double t = sources[k].next;
            if (!(t <= stop)) break;
            ArrivalSource& src = sources[k];
            const double v = src.cls->valuation.sample(src.rng);
            const double d = src.cls->duration.sample(src.rng);
            src.restart(t);
            ++out.counts.arrivals;
            const bool trace_path = trace && path == 0;
            if (trace_path) trace->write(t, "arrival", k, -1, v);
            if (prices[k] > v) {
                ++out.counts.lost_price;
                if (trace_path) trace->write(t, "lost_price", k, -1, v);
            } else if (busy_until > t) {
                ++out.counts.lost_busy;
                if (trace_path) trace->write(t, "lost_busy", k, -1, v);
            } else {
                ++out.counts.accepted;
                busy_until = t + d;
                const double margin = spec.commission_retention * prices[k] - spec.cost;
                // integral of exp(-gamma u) over [t, t + d]
                value += margin * std::exp(-gamma * t) * (-std::expm1(-gamma * d)) / gamma;
                if (trace_path) trace->write(t, "accept", k, 0, prices[k]);
            }
        }
        total += normalize ? gamma * value : value;
    }
    out.value = total / static_cast<double>(paths);
    out.worker_values[0] = out.value;
    return out;
}

template <class Run>
std::vector<ReplicationResult> run_replications(const SimConfig& cfg, Run&& run) {
    std::vector<ReplicationResult> results(cfg.replications);
    TraceLog trace(cfg.trace_path);
    results[0] = run(std::size_t{0}, trace.enabled() ? &trace : nullptr);
    if (cfg.replications == 1) return results;

    unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(cfg.replications - 1));
    std::atomic<std::size_t> next{1};
    auto worker = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < cfg.replications;) results[r] = run(r, nullptr);
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
    }
    return results;
}

SimStats aggregate(const SimConfig& cfg, const std::vector<ReplicationResult>& reps, std::string quantity) {
    SimStats st;
    st.quantity = std::move(quantity);
    st.replications = reps.size();
    st.horizon = cfg.effective_horizon();
    const std::size_t n = cfg.scenario.workers.size();
    const std::size_t tracked = reps.front().worker_values.size();
    for (const auto& r : reps) {
        st.replication_values.push_back(r.value);
        st.counts += r.counts;
    }
    st.value = summarize(st.replication_values);
    for (std::size_t w = 0; w < std::min(n, tracked); ++w) {
        WorkerSimStats ws;
        ws.rank = cfg.scenario.workers[w].rank;
        std::vector<double> busy;
        for (const auto& r : reps) {
            ws.replication_values.push_back(r.worker_values[w]);
            busy.push_back(r.worker_busy[w]);
        }
        ws.value = summarize(ws.replication_values);
        ws.busy_fraction = summarize(busy);
        st.workers.push_back(std::move(ws));
    }
    return st;
}

}  // namespace

// ---------------------------------------------------------------------------

double SimConfig::effective_horizon() const {
    if (horizon > 0.0) return horizon;
    const double lambda = scenario.total_arrival_rate();
    return lambda > 0.0 ? expected_arrivals / lambda : expected_arrivals;
}

void SimConfig::validate() const {
    scenario.validate();
    if (horizon < 0.0 || !std::isfinite(horizon)) throw ConfigError("horizon", "must be > 0");
    if (!(expected_arrivals > 0.0)) throw ConfigError("expected_arrivals", "must be > 0");
    if (replications < 1) throw ConfigError("replications", "must be >= 1");
    if (!(warmup_fraction >= 0.0 && warmup_fraction <= 0.5)) throw ConfigError("warmup_fraction", "must lie in [0, 0.5]");
}

EventCounts& EventCounts::operator+=(const EventCounts& o) {
    arrivals += o.arrivals;
    accepted += o.accepted;
    lost_busy += o.lost_busy;
    lost_price += o.lost_price;
    return *this;
}

Estimate summarize(const std::vector<double>& values) {
    Estimate e;
    if (values.empty()) return e;
    const double n = static_cast<double>(values.size());
    e.mean = std::accumulate(values.begin(), values.end(), 0.0) / n;
    if (values.size() > 1) {
        double ss = 0.0;
        for (double v : values) ss += (v - e.mean) * (v - e.mean);
        e.standard_error = std::sqrt(ss / (n - 1.0) / n);
    }
    return e;
}

SimStats simulate(const SimConfig& config, const std::vector<PriceVector>& prices) {
    config.validate();
    if (config.scenario.queue_capacity != 0) throw ModelMismatch("scenario has a queue; use simulate_queue");
    if (config.scenario.has_patient_class()) throw ModelMismatch("patient classes are not simulated");
    check_prices(config.scenario, prices);
    const auto reps = run_replications(config, [&](std::size_t r, TraceLog* t) { return run_loss(config, prices, r, t); });
    return aggregate(config, reps, "rate");
}

SimStats simulate(const SimConfig& config, const PriceVector& single_worker_prices) {
    return simulate(config, std::vector<PriceVector>{single_worker_prices});
}

namespace {

SimStats simulate_discounted_impl(const SimConfig& config, const PriceVector& prices,
                                  const std::vector<MixtureComponent>& components, bool normalize) {
    config.validate();
    const Scenario& s = config.scenario;
    if (s.queue_capacity != 0 || s.workers.size() != 1)
        throw ModelMismatch("discounted simulation models one loss-system worker");
    check_prices(s, {prices});
    double min_gamma = kInf;
    for (const auto& c : components) {
        if (!(c.rate > 0.0)) throw ModelMismatch("discount rate must be positive");
        min_gamma = std::min(min_gamma, c.rate);
    }
    const std::size_t paths = discounted_paths(config, min_gamma);
    const auto reps = run_replications(config, [&](std::size_t r, TraceLog* t) {
        return run_discounted(config, prices, components, normalize, paths, r, t);
    });
    SimStats st = aggregate(config, reps, "discounted_value");
    st.paths_per_replication = paths;
    st.horizon = -std::log(kDiscountCutoff) / min_gamma;
    return st;
}

}  // namespace

SimStats simulate_discounted(const SimConfig& config, const PriceVector& prices, double gamma) {
    return simulate_discounted_impl(config, prices, {{1.0, gamma}}, false);
}

SimStats simulate_discounted(const SimConfig& config, const PriceVector& prices) {
    const auto& d = config.scenario.discount;
    if (const auto* e = std::get_if<ExponentialDiscount>(&d)) return simulate_discounted(config, prices, e->rate);
    return simulate_discounted_impl(config, prices, horizon_components(config.scenario), true);
}

SimStats simulate_queue(const SimConfig& config, const PriceVector& prices) {
    config.validate();
    const Scenario& s = config.scenario;
    if (s.queue_capacity != 1) throw ModelMismatch("simulate_queue needs queue_capacity = 1");
    if (s.workers.size() != 1) throw ModelMismatch("queue simulation has one worker");
    for (const auto& c : s.classes)
        if (!c.duration.is_exponential()) throw ModelMismatch("queue model needs exponential durations");
    check_prices(s, {prices});
    const auto reps = run_replications(config, [&](std::size_t r, TraceLog* t) { return run_queue(config, prices, r, t); });
    return aggregate(config, reps, "rate");
}

bool DeviationScan::any_improvement() const {
    return std::any_of(points.begin(), points.end(), [](const DeviationPoint& p) { return p.significant_improvement; });
}

DeviationScan deviation_scan(const SimConfig& config, const std::vector<PriceVector>& profile, std::size_t worker,
                             const std::vector<double>& factors) {
    if (worker >= profile.size()) throw ConfigError("worker", "index out of range");
    SimConfig cfg = config;
    cfg.trace_path.reset();
    DeviationScan scan;
    scan.worker = worker;
    scan.baseline = simulate(cfg, profile).workers[worker].value;
    for (double f : factors) {
        auto perturbed = profile;
        for (auto& p : perturbed[worker]) p *= f;
        DeviationPoint point;
        point.factor = f;
        point.prices = perturbed[worker];
        point.value = simulate(cfg, perturbed).workers[worker].value;
        point.delta = point.value.mean - scan.baseline.mean;
        point.delta_standard_error = std::hypot(point.value.standard_error, scan.baseline.standard_error);
        point.significant_improvement = point.delta > 1.96 * point.delta_standard_error;
        scan.points.push_back(std::move(point));
    }
    return scan;
}

std::vector<PriceVector> profile_prices(const Scenario& scenario, const EquilibriumProfile& equilibrium) {
    std::vector<PriceVector> prices(scenario.workers.size());
    for (const auto& w : equilibrium.workers) {
        for (std::size_t j = 0; j < scenario.workers.size(); ++j)
            if (scenario.workers[j].rank == w.rank) prices[j] = w.prices;
    }
    return prices;
}

DeviationScan deviation_scan(const SimConfig& config, const EquilibriumProfile& equilibrium, std::size_t worker,
                             const std::vector<double>& factors) {
    return deviation_scan(config, profile_prices(config.scenario, equilibrium), worker, factors);
}

}  // namespace odp
