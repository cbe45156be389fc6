#pragma once

#include <string>

#include <json.hpp>

#include "archon/diag.hpp"

namespace archon {

// Renders a text template against a JSON context.
//
//   {{name}}            substitute the value found under `name`
//   {{#name}}...{{/name}}  repeat for each array element, or once for a
//                        truthy scalar/object; the element becomes the
//                        innermost lookup scope
//   {{^name}}...{{/name}}  render once when `name` is absent, false, or empty
//
// Names are dotted paths (`port.peer`); lookup walks the scope stack from the
// innermost section outwards. Section tags alone on a line do not leave a
// blank line behind. There is no escaping and no other logic.
std::string render_template(const std::string& tpl, const nlohmann::json& context);

}  // namespace archon
