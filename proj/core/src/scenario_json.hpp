#pragma once

#include "json_util.hpp"
#include "sam/simenv.hpp"

namespace sam {

Scenario scenario_from_json(const nlohmann::json& doc);
nlohmann::json scenario_to_json(const Scenario& s);

}  // namespace sam
