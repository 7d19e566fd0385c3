#pragma once

#include <string>

#include "willslab/geometry.hpp"
#include "willslab/intrinsic.hpp"

namespace wills {

/// Body documents: {"dim": n, "kind": "box"|"ball"|"hpolytope", ...} with
/// arrays for vectors; see the README for the full schema. Parsing failures
/// raise input errors.
std::string body_to_json(const ConvexBody& body);
ConvexBody body_from_json(const std::string& text);

/// Profile documents: {"d": n, "log_v": [...]}.
std::string profile_to_json(const IntrinsicProfile& profile);
IntrinsicProfile profile_from_json(const std::string& text);

} // namespace wills
