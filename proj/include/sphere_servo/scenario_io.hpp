#pragma once

#include <string>

#include <json.hpp>

#include "sphere_servo/sim_harness.hpp"

namespace sphere_servo {

/// Serializes every field of the configuration, with the low-pass cutoff
/// resolved. Vectors are arrays, matrices 9-element row-major arrays.
nlohmann::json scenario_to_json(const ScenarioConfig& cfg);

/// Reads a scenario document on top of `base`: absent keys keep the base
/// value. Unknown keys, wrong types and invalid values throw kConfigInvalid
/// with the field path. The result is validated. Bearing references are
/// normalized on load.
ScenarioConfig scenario_from_json(const nlohmann::json& doc,
                                  const ScenarioConfig& base = paper_scenario());

ScenarioConfig load_scenario_file(const std::string& path,
                                  const ScenarioConfig& base = paper_scenario());

/// Sets the value at a dotted path ("gains.k1"), creating objects as needed.
void set_json_path(nlohmann::json& doc, const std::string& dotted_path, const nlohmann::json& value);

}  // namespace sphere_servo
