#pragma once

#include <memory>
#include <string>

#include "core/initial_map.hpp"

namespace hodo {

// Build a map from a JSON document:
//   {"dim": n, "builtin": "name", "params": {...}}   for built-ins, or
//   {"dim": n, "expr": ["...", ...]}                 for expression maps.
// Both forms accept an optional "box": [[lo,hi], ...]. Unknown keys are
// rejected (errc::config); malformed JSON raises errc::parse.
std::unique_ptr<InitialMap> map_from_json(const std::string& json_text);

// Build a map from the CLI shorthand "name" or "name:key=value,key=value",
// e.g. "cubic", "rotational:alpha=1", "harmonic:W=(u2^2-u1^2)/2", or
// "expr:f1=u1+u2,f2=u2" for expression maps (components in order).
std::unique_ptr<InitialMap> map_from_spec(const std::string& spec);

}  // namespace hodo
