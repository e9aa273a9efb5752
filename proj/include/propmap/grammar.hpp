#pragma once

#include <string>

#include "propmap/map_model.hpp"

namespace propmap {

// Text grammar for maps and sphere maps (the `map` / `sphere_map` fields of
// CLI job files). See README for the full syntax.
MapSpec parse_map(const std::string& text);
SphereMapSpec parse_sphere_map(const std::string& text);

std::string map_to_text(const MapSpec& spec);
std::string sphere_to_text(const SphereMapSpec& spec);

}  // namespace propmap
