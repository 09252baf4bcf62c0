#pragma once

#include "cdplan/scenario.hpp"
#include "json_io.hpp"

namespace cdplan::io {

json scenario_json(const Scenario& scenario);
Scenario scenario_from_json(const json& j, const LoadOptions& options,
                            std::vector<std::string>* warnings);

}  // namespace cdplan::io
