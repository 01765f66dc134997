// JSON serialization of condenser specs. Serialization is deterministic:
// loading a file and saving it again reproduces the bytes exactly.
#pragma once

#include <string>

#include "mazecap/geometry.hpp"

namespace mazecap {

std::string spec_to_json(const CondenserSpec& spec);
CondenserSpec spec_from_json(const std::string& text);

void save_spec(const CondenserSpec& spec, const std::string& path);
CondenserSpec load_spec(const std::string& path);

} // namespace mazecap
