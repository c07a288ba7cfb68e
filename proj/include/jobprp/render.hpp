#pragma once

#include <string>

#include "jobprp/instance.hpp"
#include "jobprp/model.hpp"

namespace jobprp {

// Static SVG of the instance graph: racks and corridors when the layout is
// known, arcs, vertices and, when `plan` is given, one stroke colour per
// trolley walk. Output depends only on the arguments.
std::string render_svg(const Instance& inst, const Plan* plan = nullptr);

}  // namespace jobprp
