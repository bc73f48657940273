#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cstrata/newton_polygon.hpp"

namespace cstrata::cli {

/// One panel per polygon, stacked vertically: the polygon over the integer
/// grid, vertices labeled (a, b) and segments labeled with their slope.
std::string polygons_svg(const std::vector<std::pair<std::string, NewtonPolygon>>& panels);

}  // namespace cstrata::cli
