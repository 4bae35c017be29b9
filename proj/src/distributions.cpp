#include "odp/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "odp/error.hpp"
#include "odp/rng.hpp"

namespace odp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const std::string& what) {
    if (!ok) throw ConfigError("", what);
}

// Index i with knots[i].x <= p < knots[i+1].x; assumes knots.front().x <= p < knots.back().x.
std::size_t segment_of(const std::vector<std::pair<double, double>>& knots, double p) {
    auto it = std::upper_bound(knots.begin(), knots.end(), p,
                               [](double v, const auto& k) { return v < k.first; });
    return static_cast<std::size_t>(std::distance(knots.begin(), it)) - 1;
}

double segment_slope(const std::vector<std::pair<double, double>>& knots, std::size_t i) {
    return (knots[i + 1].second - knots[i].second) / (knots[i + 1].first - knots[i].first);
}

}  // namespace

ValuationDistribution::ValuationDistribution(Law law) : law_(std::move(law)) {
    std::visit(overloaded{
                   [this](const UniformValuation& u) {
                       lower_ = u.low;
                       upper_ = u.high;
                   },
                   [this](const ExponentialValuation& e) {
                       lower_ = 0.0;
                       upper_ = -std::log(kUnboundedTailMass) / e.rate;
                   },
                   [this](const PiecewiseLinearValuation& pl) {
                       lower_ = pl.knots.front().first;
                       upper_ = pl.knots.back().first;
                   },
               },
               law_);
}

ValuationDistribution ValuationDistribution::uniform(double low, double high) {
    require(std::isfinite(low) && std::isfinite(high), "uniform bounds must be finite");
    require(low >= 0.0, "uniform lower bound must be >= 0");
    require(high > low, "uniform requires high > low");
    return ValuationDistribution(UniformValuation{low, high});
}

ValuationDistribution ValuationDistribution::exponential(double rate) {
    require(std::isfinite(rate) && rate > 0.0, "exponential rate must be positive and finite");
    return ValuationDistribution(ExponentialValuation{rate});
}

ValuationDistribution ValuationDistribution::piecewise_linear(std::vector<std::pair<double, double>> knots) {
    require(knots.size() >= 2, "piecewise-linear cdf needs at least two knots");
    require(knots.front().first >= 0.0, "piecewise-linear cdf must start at x >= 0");
    require(knots.front().second == 0.0, "piecewise-linear cdf must start at F = 0");
    require(knots.back().second == 1.0, "piecewise-linear cdf must end at F = 1");
    for (std::size_t i = 0; i + 1 < knots.size(); ++i) {
        require(std::isfinite(knots[i + 1].first), "knot abscissae must be finite");
        require(knots[i + 1].first > knots[i].first, "knot abscissae must be strictly increasing");
        require(knots[i + 1].second >= knots[i].second, "cdf values must be nondecreasing");
    }
    return ValuationDistribution(PiecewiseLinearValuation{std::move(knots)});
}

std::string ValuationDistribution::kind() const {
    return std::visit(overloaded{
                          [](const UniformValuation&) { return std::string("uniform"); },
                          [](const ExponentialValuation&) { return std::string("exponential"); },
                          [](const PiecewiseLinearValuation&) { return std::string("piecewise_linear"); },
                      },
                      law_);
}

double ValuationDistribution::cdf(double p) const {
    return std::visit(overloaded{
                          [p](const UniformValuation& u) {
                              if (p <= u.low) return 0.0;
                              if (p >= u.high) return 1.0;
                              return (p - u.low) / (u.high - u.low);
                          },
                          [p](const ExponentialValuation& e) {
                              return p <= 0.0 ? 0.0 : 1.0 - std::exp(-e.rate * p);
                          },
                          [p](const PiecewiseLinearValuation& pl) {
                              const auto& k = pl.knots;
                              if (p <= k.front().first) return 0.0;
                              if (p >= k.back().first) return 1.0;
                              const std::size_t i = segment_of(k, p);
                              return k[i].second + segment_slope(k, i) * (p - k[i].first);
                          },
                      },
                      law_);
}

double ValuationDistribution::tail(double p) const {
    // Exponential tail computed directly to keep precision far out.
    if (const auto* e = std::get_if<ExponentialValuation>(&law_)) {
        return p <= 0.0 ? 1.0 : std::exp(-e->rate * p);
    }
    return 1.0 - cdf(p);
}

double ValuationDistribution::density(double p) const {
    return std::visit(overloaded{
                          [p](const UniformValuation& u) {
                              return (p < u.low || p > u.high) ? 0.0 : 1.0 / (u.high - u.low);
                          },
                          [p](const ExponentialValuation& e) {
                              return p < 0.0 ? 0.0 : e.rate * std::exp(-e.rate * p);
                          },
                          [p](const PiecewiseLinearValuation& pl) {
                              const auto& k = pl.knots;
                              if (p < k.front().first || p > k.back().first) return 0.0;
                              if (p == k.back().first) return segment_slope(k, k.size() - 2);
                              return segment_slope(k, segment_of(k, p));
                          },
                      },
                      law_);
}

double ValuationDistribution::quantile(double u) const {
    u = std::clamp(u, 0.0, 1.0);
    return std::visit(overloaded{
                          [u](const UniformValuation& d) { return d.low + u * (d.high - d.low); },
                          [u, this](const ExponentialValuation& e) {
                              if (u >= 1.0 - kUnboundedTailMass) return upper_;
                              return -std::log1p(-u) / e.rate;
                          },
                          [u](const PiecewiseLinearValuation& pl) {
                              const auto& k = pl.knots;
                              if (u <= 0.0) return k.front().first;
                              for (std::size_t i = 0; i + 1 < k.size(); ++i) {
                                  if (u <= k[i + 1].second && k[i + 1].second > k[i].second) {
                                      const double t = (u - k[i].second) / (k[i + 1].second - k[i].second);
                                      return k[i].first + std::max(0.0, t) * (k[i + 1].first - k[i].first);
                                  }
                              }
                              return k.back().first;
                          },
                      },
                      law_);
}

ValuationDistribution ValuationDistribution::scaled(double factor) const {
    require(std::isfinite(factor) && factor > 0.0, "scale factor must be positive");
    return std::visit(overloaded{
                          [factor](const UniformValuation& u) {
                              return ValuationDistribution::uniform(u.low * factor, u.high * factor);
                          },
                          [factor](const ExponentialValuation& e) {
                              return ValuationDistribution::exponential(e.rate / factor);
                          },
                          [factor](const PiecewiseLinearValuation& pl) {
                              auto knots = pl.knots;
                              for (auto& k : knots) k.first *= factor;
                              return ValuationDistribution::piecewise_linear(std::move(knots));
                          },
                      },
                      law_);
}

double ValuationDistribution::sample(RandomStream& rng) const { return quantile(rng.uniform()); }

bool operator==(const ValuationDistribution& a, const ValuationDistribution& b) {
    return std::visit(overloaded{
                          [](const UniformValuation& x, const UniformValuation& y) {
                              return x.low == y.low && x.high == y.high;
                          },
                          [](const ExponentialValuation& x, const ExponentialValuation& y) {
                              return x.rate == y.rate;
                          },
                          [](const PiecewiseLinearValuation& x, const PiecewiseLinearValuation& y) {
                              return x.knots == y.knots;
                          },
                          [](const auto&, const auto&) { return false; },
                      },
                      a.law_, b.law_);
}

double virtual_value(const ValuationDistribution& dist, double p) {
    const double f = dist.density(p);
    if (!(f > 0.0)) {
        std::ostringstream msg;
        msg << "density of " << dist.kind() << " valuation vanishes at p=" << p;
        throw ZeroDensity(msg.str());
    }
    return p - dist.tail(p) / f;
}

std::string to_string(Regularity r) {
    switch (r) {
        case Regularity::strictly_regular: return "strictly_regular";
        case Regularity::regular: return "regular";
        case Regularity::irregular: return "irregular";
    }
    return "irregular";
}

Regularity regularity_check(const ValuationDistribution& dist) {
    const double lo = dist.lower();
    const double hi = dist.upper();
    const int n = kRegularityGridPoints;
    bool strict = true;
    double prev = 0.0;
    for (int i = 0; i < n; ++i) {
        const double p = std::min(hi, lo + (hi - lo) * static_cast<double>(i) / (n - 1));
        const double f = dist.density(p);
        if (!(f > 0.0)) return Regularity::irregular;
        const double psi = p - dist.tail(p) / f;
        if (i > 0) {
            const double step = psi - prev;
            if (step < -1e-12) return Regularity::irregular;
            if (step <= kStrictRegularityMargin) strict = false;
        }
        prev = psi;
    }
    return strict ? Regularity::strictly_regular : Regularity::regular;
}

// ---------------------------------------------------------------------------

DurationDistribution::DurationDistribution(Law law) : law_(std::move(law)) {
    mean_ = std::visit(overloaded{
                           [](const ExponentialDuration& e) { return 1.0 / e.rate; },
                           [](const DeterministicDuration& d) { return d.value; },
                           [](const EmpiricalDuration& s) {
                               return std::accumulate(s.samples.begin(), s.samples.end(), 0.0) /
                                      static_cast<double>(s.samples.size());
                           },
                       },
                       law_);
}

DurationDistribution DurationDistribution::exponential(double rate) {
    require(std::isfinite(rate) && rate > 0.0, "exponential duration rate must be positive and finite");
    return DurationDistribution(ExponentialDuration{rate});
}

DurationDistribution DurationDistribution::deterministic(double value) {
    require(std::isfinite(value) && value > 0.0, "deterministic duration must be positive and finite");
    return DurationDistribution(DeterministicDuration{value});
}

DurationDistribution DurationDistribution::empirical(std::vector<double> samples) {
    require(!samples.empty(), "empirical duration needs at least one sample");
    for (double s : samples) require(std::isfinite(s) && s >= 0.0, "duration samples must be finite and >= 0");
    DurationDistribution d(EmpiricalDuration{std::move(samples)});
    require(d.mean() > 0.0, "empirical duration mean must be positive");
    return d;
}

std::string DurationDistribution::kind() const {
    return std::visit(overloaded{
                          [](const ExponentialDuration&) { return std::string("exponential"); },
                          [](const DeterministicDuration&) { return std::string("deterministic"); },
                          [](const EmpiricalDuration&) { return std::string("empirical"); },
                      },
                      law_);
}

double DurationDistribution::expected_min_with_exponential(double gamma) const {
    return std::visit(overloaded{
                          [gamma](const ExponentialDuration& e) { return 1.0 / (e.rate + gamma); },
                          [gamma](const DeterministicDuration& d) { return -std::expm1(-gamma * d.value) / gamma; },
                          [gamma](const EmpiricalDuration& s) {
                              double acc = 0.0;
                              for (double x : s.samples) acc += -std::expm1(-gamma * x);
                              return acc / (gamma * static_cast<double>(s.samples.size()));
                          },
                      },
                      law_);
}

DurationDistribution DurationDistribution::time_scaled(double factor) const {
    require(std::isfinite(factor) && factor > 0.0, "time scale factor must be positive");
    return std::visit(overloaded{
                          [factor](const ExponentialDuration& e) { return exponential(e.rate / factor); },
                          [factor](const DeterministicDuration& d) { return deterministic(d.value * factor); },
                          [factor](const EmpiricalDuration& s) {
                              auto samples = s.samples;
                              for (auto& x : samples) x *= factor;
                              return empirical(std::move(samples));
                          },
                      },
                      law_);
}

double DurationDistribution::sample(RandomStream& rng) const {
    return std::visit(overloaded{
                          [&rng](const ExponentialDuration& e) { return rng.exponential(e.rate); },
                          [](const DeterministicDuration& d) { return d.value; },
                          [&rng](const EmpiricalDuration& s) {
                              const auto n = s.samples.size();
                              auto i = static_cast<std::size_t>(rng.uniform() * static_cast<double>(n));
                              return s.samples[std::min(i, n - 1)];
                          },
                      },
                      law_);
}

}  // namespace odp
