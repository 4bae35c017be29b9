#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "odp/model.hpp"

namespace odp {

struct CheckResult {
    std::string name;
    bool passed = false;
    double expected = 0.0;   ///< analytic value
    double observed = 0.0;   ///< simulated (or second analytic) value
    double tolerance = 0.0;  ///< allowed |observed - expected|
    std::string detail;
};

struct ValidationReport {
    std::vector<CheckResult> checks;
    bool passed() const;
};

struct ValidationOptions {
    std::uint64_t seed = 1;
    std::size_t replications = 30;
    double expected_arrivals = 1e5;
    double sigma = 3.0;  ///< simulation checks pass within sigma standard errors
    /// Relative error injected into every analytic reference value. Nonzero values exist to
    /// confirm that the battery detects a broken model.
    double perturbation = 0.0;
    unsigned threads = 0;
};

/// Cross-checks the analytic model of the scenario against a second derivation and against
/// the discrete-event simulator. The checks run depend on the model the scenario calls for.
ValidationReport validate_scenario(const Scenario& scenario, const ValidationOptions& options = {});

}  // namespace odp
