#pragma once

#include <string>
#include <vector>

#include "willslab/cltlab.hpp"

namespace wills::tool {

/// Log-log scatter of per-dimension distances with DKW bands and the fitted
/// rate line. Self-contained SVG, no plotting dependency.
std::string clt_report_svg(const CltReport& report);

} // namespace wills::tool
