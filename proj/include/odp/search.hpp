#pragma once

#include <cstdint>
#include <functional>
#include <vector>

namespace odp {

struct Maximum1D {
    double x = 0.0;
    double value = 0.0;
};

/// Golden-section search for a maximum of `f` on [lo, hi]; stops when the bracket is narrower than `tol`.
Maximum1D golden_section_max(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12);

/// Scans `grid_points` equally spaced points of [lo, hi], then refines around the best one with
/// golden-section search. Handles objectives that are not unimodal on the whole interval.
Maximum1D grid_golden_max(const std::function<double(double)>& f, double lo, double hi, int grid_points,
                          double tol = 1e-12);

struct MaximumND {
    std::vector<double> x;
    double value = 0.0;
    int sweeps = 0;
};

struct CoordinateSearchOptions {
    int restarts = 20;
    double tol = 1e-10;        ///< stop when no coordinate moves more than this in a sweep
    int max_sweeps = 5000;
    int grid_points = 64;      ///< coarse scan per coordinate before golden refinement
    std::uint64_t seed = 7;    ///< start points after the first (box centre) are drawn from this seed
};

/// Multi-start cyclic coordinate ascent over the box [lower, upper].
MaximumND coordinate_search_max(const std::function<double(const std::vector<double>&)>& f,
                                const std::vector<double>& lower, const std::vector<double>& upper,
                                const CoordinateSearchOptions& options = {});

}  // namespace odp
