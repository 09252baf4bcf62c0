#pragma once

#include <filesystem>
#include <string>

#include "cdplan/pipeline.hpp"

namespace cdplan {

/// Domain, obstacles before (gray) and after displacement (cyan), robot
/// footprints along the trajectory, start (green) and goal (red).
std::string render_svg(const RunReport& report);
void render_svg(const RunReport& report, const std::filesystem::path& path);

}  // namespace cdplan
