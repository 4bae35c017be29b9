#pragma once

#include <filesystem>
#include <string>

#include "json.hpp"
#include "odp/model.hpp"

namespace odp {

/// Parses a scenario document. Unknown keys are rejected; errors carry the offending key path.
Scenario scenario_from_json(const nlohmann::json& doc);
Scenario load_scenario(const std::filesystem::path& path);

nlohmann::json scenario_to_json(const Scenario& scenario);

}  // namespace odp
