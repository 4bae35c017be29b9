#pragma once

#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace odp {

class RandomStream;

// ---------------------------------------------------------------------------
// Valuation laws: a customer's per-hour willingness to pay.
// ---------------------------------------------------------------------------

struct UniformValuation {
    double low = 0.0;
    double high = 1.0;
};

struct ExponentialValuation {
    double rate = 1.0;
};

/// Piecewise-linear CDF through `knots` (x, F(x)). The first knot has F = 0, the
/// last F = 1, and both coordinates are nondecreasing. The density on each
/// interval is its slope; at a knot the right-hand slope is used.
struct PiecewiseLinearValuation {
    std::vector<std::pair<double, double>> knots;
};

/// Tail mass cut off when an unbounded valuation law is given an operational upper bound.
inline constexpr double kUnboundedTailMass = 1e-12;

class ValuationDistribution {
public:
    using Law = std::variant<UniformValuation, ExponentialValuation, PiecewiseLinearValuation>;

    static ValuationDistribution uniform(double low, double high);
    static ValuationDistribution exponential(double rate);
    static ValuationDistribution piecewise_linear(std::vector<std::pair<double, double>> knots);

    const Law& law() const noexcept { return law_; }
    std::string kind() const;

    double cdf(double p) const;
    double tail(double p) const;
    double density(double p) const;
    /// Inverse CDF on [0, 1].
    double quantile(double u) const;

    /// Lower end of the support.
    double lower() const noexcept { return lower_; }
    /// Upper end of the support; quantile(1 - 1e-12) for exponential laws.
    double upper() const noexcept { return upper_; }

    /// Law of v * factor when v follows this law.
    ValuationDistribution scaled(double factor) const;

    double sample(RandomStream& rng) const;

    friend bool operator==(const ValuationDistribution& a, const ValuationDistribution& b);

private:
    explicit ValuationDistribution(Law law);

    Law law_;
    double lower_ = 0.0;
    double upper_ = 1.0;
};

/// p - tail(p)/density(p). Throws ZeroDensity when the density vanishes at p.
double virtual_value(const ValuationDistribution& dist, double p);

enum class Regularity { strictly_regular, regular, irregular };

std::string to_string(Regularity r);

/// Number of grid points used by regularity_check.
inline constexpr int kRegularityGridPoints = 10000;
/// Minimum increase of the virtual value between consecutive grid points for strict regularity.
inline constexpr double kStrictRegularityMargin = 1e-9;

/// Classifies the virtual value on a uniform grid over the support.
Regularity regularity_check(const ValuationDistribution& dist);

// ---------------------------------------------------------------------------
// Job-duration laws.
// ---------------------------------------------------------------------------

struct ExponentialDuration {
    double rate = 1.0;
};

struct DeterministicDuration {
    double value = 1.0;
};

struct EmpiricalDuration {
    std::vector<double> samples;
};

class DurationDistribution {
public:
    using Law = std::variant<ExponentialDuration, DeterministicDuration, EmpiricalDuration>;

    static DurationDistribution exponential(double rate);
    static DurationDistribution deterministic(double value);
    static DurationDistribution empirical(std::vector<double> samples);

    const Law& law() const noexcept { return law_; }
    std::string kind() const;
    bool is_exponential() const noexcept { return std::holds_alternative<ExponentialDuration>(law_); }

    double mean() const noexcept { return mean_; }
    /// Service rate 1/mean.
    double rate() const noexcept { return 1.0 / mean_; }

    /// E[min(X, Y)] with Y ~ Exp(gamma) independent of X.
    double expected_min_with_exponential(double gamma) const;

    /// Same law with time stretched by `factor` (durations multiplied).
    DurationDistribution time_scaled(double factor) const;

    double sample(RandomStream& rng) const;

private:
    explicit DurationDistribution(Law law);

    Law law_;
    double mean_ = 1.0;
};

}  // namespace odp
