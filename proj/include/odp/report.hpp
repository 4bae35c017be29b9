#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"
#include "odp/competition.hpp"
#include "odp/optimizer.hpp"
#include "odp/simulator.hpp"

namespace odp {

/// Six significant digits, the precision used for everything printed to a terminal.
std::string format_number(double x);

nlohmann::json to_json(const Estimate& e);
nlohmann::json to_json(const SimStats& stats);
nlohmann::json to_json(const OptimalSolution& solution);
nlohmann::json to_json(const EquilibriumProfile& profile);
nlohmann::json to_json(const DynamicsReport& report);
nlohmann::json to_json(const DeviationScan& scan);

/// One row of a parameter sweep.
struct SweepRow {
    double parameter = 0.0;
    PriceVector prices;
    double rate = 0.0;
};

/// Column label of class k's optimal price: p_A_star, p_B_star, ... (p_27_star past Z).
std::string price_column(std::size_t k);

/// Header `<parameter>,p_A_star,...,rate`; numbers at 17 significant digits.
void write_sweep_csv(std::ostream& out, const std::string& parameter, std::size_t classes,
                     const std::vector<SweepRow>& rows);

/// Reproducibility record written next to every command's outputs.
struct RunManifest {
    std::string command;
    std::string config_path;
    std::uint64_t seed = 0;
    std::vector<std::string> outputs;
    std::string tool_version = ODP_VERSION;
    double wall_seconds = 0.0;
    std::vector<std::string> argv;
};

nlohmann::json to_json(const RunManifest& manifest);

/// Writes pretty JSON followed by a newline; throws Error when the file cannot be opened.
void write_json_file(const std::filesystem::path& path, const nlohmann::json& doc);

}  // namespace odp
