#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "archon/adl_parser.hpp"
#include "archon/model.hpp"
#include "archon/psc.hpp"

#ifndef ARCHON_FIXTURES_DIR
#error "ARCHON_FIXTURES_DIR must be defined by the build"
#endif

namespace archon::testing {

inline std::string fixture_path(const std::string& name) {
    return std::string(ARCHON_FIXTURES_DIR) + "/" + name;
}

inline std::string template_dir() { return std::string(ARCHON_TEMPLATES_DIR) + "/default"; }

inline std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

inline Architecture load_arch(const std::string& fixture) {
    Architecture arch = parse_architecture(slurp(fixture_path(fixture)));
    ValidationReport report = validate(arch);
    if (!report.ok()) throw std::runtime_error(fixture + ": " + format_findings(report.findings));
    return arch;
}

inline std::vector<PscProperty> load_props(const std::string& fixture) {
    return parse_properties(slurp(fixture_path(fixture)));
}

// First property named `name`; throws when absent.
inline BoundProperty bind_prop(const Architecture& arch, const std::vector<PscProperty>& props,
                               const std::string& name) {
    for (const auto& p : props)
        if (p.name == name) return bind(p, arch).property;
    throw std::runtime_error("no property named " + name);
}

}  // namespace archon::testing
