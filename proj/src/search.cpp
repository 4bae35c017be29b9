#include "odp/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "odp/rng.hpp"

namespace odp {

Maximum1D golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498948482;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    while (b - a > tol) {
        if (fc >= fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
        if (b - a <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(a), std::abs(b))) break;
    }
    // Endpoints are candidates too: golden search never evaluates them.
    Maximum1D best{c, fc};
    if (fd > best.value) best = {d, fd};
    for (double x : {lo, hi}) {
        const double v = f(x);
        if (v > best.value) best = {x, v};
    }
    return best;
}

Maximum1D grid_golden_max(const std::function<double(double)>& f, double lo, double hi, int grid_points,
                          double tol) {
    grid_points = std::max(grid_points, 2);
    const double step = (hi - lo) / (grid_points - 1);
    int best_i = 0;
    double best_v = f(lo);
    for (int i = 1; i < grid_points; ++i) {
        const double v = f(i == grid_points - 1 ? hi : lo + step * i);
        if (v > best_v) {
            best_v = v;
            best_i = i;
        }
    }
    const double a = std::max(lo, lo + step * (best_i - 1));
    const double b = std::min(hi, lo + step * (best_i + 1));
    Maximum1D refined = golden_section_max(f, a, b, tol);
    const double grid_x = best_i == grid_points - 1 ? hi : lo + step * best_i;
    if (best_v > refined.value) return {grid_x, best_v};
    return refined;
}

MaximumND coordinate_search_max(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& lower, const std::vector<double>& upper,
                                const CoordinateSearchOptions& options) {
    const std::size_t n = lower.size();
    RandomStream rng(options.seed);
    MaximumND best;
    best.value = -std::numeric_limits<double>::infinity();

    for (int start = 0; start < std::max(options.restarts, 1); ++start) {
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double u = start == 0 ? 0.5 : rng.uniform();
            x[i] = lower[i] + u * (upper[i] - lower[i]);
        }
        double value = f(x);
        int sweep = 0;
        for (; sweep < options.max_sweeps; ++sweep) {
            double max_move = 0.0;
            const double before = value;
            for (std::size_t i = 0; i < n; ++i) {
                auto along = [&](double t) {
                    std::vector<double> y = x;
                    y[i] = t;
                    return f(y);
                };
                const Maximum1D m = grid_golden_max(along, lower[i], upper[i], options.grid_points, 1e-13);
                if (m.value > value) {
                    max_move = std::max(max_move, std::abs(m.x - x[i]));
                    x[i] = m.x;
                    value = m.value;
                }
            }
            const double gain = value - before;
            if (max_move <= options.tol || gain <= 1e-16 * std::abs(value)) {
                ++sweep;
                break;
            }
        }
        if (value > best.value) {
            best.x = x;
            best.value = value;
            best.sweeps = sweep;
        }
    }
    return best;
}

}  // namespace odp
