#pragma once

#include <string>

#include "archon/model.hpp"

namespace archon {

// Parses one architecture description. Throws ParseError with line/column
// on syntax errors, duplicate identifiers, or references to undeclared
// components, channels, or states.
Architecture parse_architecture(const std::string& text);

}  // namespace archon
