#include "archon/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace archon {

int StateMachine::state_index(const std::string& name) const {
    for (size_t i = 0; i < states.size(); ++i)
        if (states[i].name == name) return static_cast<int>(i);
    return -1;
}

int Architecture::component_index(const std::string& name) const {
    for (size_t i = 0; i < components.size(); ++i)
        if (components[i].name == name) return static_cast<int>(i);
    return -1;
}

int Architecture::channel_index(const std::string& name) const {
    for (size_t i = 0; i < channels.size(); ++i)
        if (channels[i].name == name) return static_cast<int>(i);
    return -1;
}

const StateMachine* Architecture::machine_for(int c) const {
    for (const auto& m : machines)
        if (m.owner == c) return &m;
    return nullptr;
}

bool operator==(const Transition& a, const Transition& b) {
    return a.from == b.from && a.to == b.to && a.label == b.label && a.dir == b.dir &&
           a.channel == b.channel;
}

bool operator==(const State& a, const State& b) {
    return a.name == b.name && a.is_final == b.is_final;
}

bool operator==(const StateMachine& a, const StateMachine& b) {
    return a.owner == b.owner && a.initial == b.initial && a.states == b.states &&
           a.transitions == b.transitions;
}

bool operator==(const Component& a, const Component& b) { return a.name == b.name; }

bool operator==(const Channel& a, const Channel& b) {
    return a.name == b.name && a.source == b.source && a.target == b.target;
}

bool operator==(const Architecture& a, const Architecture& b) {
    return a.name == b.name && a.components == b.components && a.channels == b.channels &&
           a.machines == b.machines;
}

void sort_findings(std::vector<Finding>& findings) {
    std::stable_sort(findings.begin(), findings.end(), [](const Finding& a, const Finding& b) {
        if (a.pos.line != b.pos.line) return a.pos.line < b.pos.line;
        if (a.pos.col != b.pos.col) return a.pos.col < b.pos.col;
        return a.message < b.message;
    });
}

std::string format_findings(const std::vector<Finding>& findings) {
    std::ostringstream out;
    for (const auto& f : findings) {
        out << (f.severity == Severity::Error ? "error" : "warning");
        if (f.pos.line > 0) out << " at " << f.pos.line << ":" << f.pos.col;
        out << ": " << f.message << "\n";
    }
    return out.str();
}

ValidationReport validate(const Architecture& arch) {
    ValidationReport report;
    auto err = [&](SourcePos pos, const std::string& msg) {
        report.findings.push_back({Severity::Error, pos, msg});
    };

    if (arch.components.empty())
        err({0, 0}, "architecture must declare at least one component");

    std::set<std::string> names;
    for (const auto& c : arch.components)
        if (!names.insert(c.name).second)
            err(c.pos, "duplicate identifier '" + c.name + "'");
    for (const auto& ch : arch.channels)
        if (!names.insert(ch.name).second)
            err(ch.pos, "duplicate identifier '" + ch.name + "'");

    const int ncomp = static_cast<int>(arch.components.size());
    for (const auto& ch : arch.channels) {
        if (ch.source < 0 || ch.source >= ncomp)
            err(ch.pos, "channel '" + ch.name + "' has an undeclared source component");
        if (ch.target < 0 || ch.target >= ncomp)
            err(ch.pos, "channel '" + ch.name + "' has an undeclared target component");
        if (ch.source == ch.target && ch.source >= 0)
            err(ch.pos, "channel '" + ch.name + "' must connect two distinct components");
    }

    std::vector<int> machine_count(static_cast<size_t>(std::max(ncomp, 0)), 0);
    for (const auto& m : arch.machines) {
        if (m.owner < 0 || m.owner >= ncomp) {
            err(m.pos, "state machine owned by an undeclared component");
            continue;
        }
        ++machine_count[m.owner];
        const std::string& owner = arch.components[m.owner].name;

        std::set<std::string> state_names;
        for (const auto& s : m.states)
            if (!state_names.insert(s.name).second)
                err(s.pos, "duplicate state '" + s.name + "' in machine '" + owner + "'");

        const int nstates = static_cast<int>(m.states.size());
        if (m.initial < 0 || m.initial >= nstates)
            err(m.pos, "machine '" + owner + "' has no declared initial state");

        for (const auto& t : m.transitions) {
            if (t.from < 0 || t.from >= nstates || t.to < 0 || t.to >= nstates) {
                err(t.pos, "transition in machine '" + owner + "' references an undeclared state");
                continue;
            }
            if (t.channel < 0 || t.channel >= static_cast<int>(arch.channels.size())) {
                err(t.pos, "transition '" + t.label + "' in machine '" + owner +
                               "' references an undeclared channel");
                continue;
            }
            const Channel& ch = arch.channels[t.channel];
            if (t.dir == Direction::Send && ch.source != m.owner)
                err(t.pos, "machine '" + owner + "' sends '" + t.label + "' on channel '" +
                               ch.name + "' but is not its source");
            if (t.dir == Direction::Receive && ch.target != m.owner)
                err(t.pos, "machine '" + owner + "' receives '" + t.label + "' on channel '" +
                               ch.name + "' but is not its target");
        }
    }
    for (int c = 0; c < ncomp; ++c) {
        if (machine_count[c] == 0)
            err(arch.components[c].pos,
                "component '" + arch.components[c].name + "' has no state machine");
        else if (machine_count[c] > 1)
            err(arch.components[c].pos,
                "component '" + arch.components[c].name + "' has more than one state machine");
    }

    sort_findings(report.findings);
    return report;
}

std::string pretty_print(const Architecture& arch) {
    std::ostringstream out;
    out << "architecture " << arch.name << " {\n";
    for (const auto& c : arch.components) out << "  component " << c.name << ";\n";
    for (const auto& ch : arch.channels)
        out << "  channel " << ch.name << " from " << arch.components[ch.source].name << " to "
            << arch.components[ch.target].name << ";\n";
    for (const auto& m : arch.machines) {
        out << "  statemachine " << arch.components[m.owner].name << " {\n";
        out << "    initial " << m.states[m.initial].name << ";\n";
        for (const auto& s : m.states)
            out << "    state " << s.name << (s.is_final ? " final" : "") << ";\n";
        for (const auto& t : m.transitions)
            out << "    " << m.states[t.from].name << " -> " << m.states[t.to].name << " : "
                << (t.dir == Direction::Send ? "send" : "recv") << " " << t.label << " on "
                << arch.channels[t.channel].name << ";\n";
        out << "  }\n";
    }
    out << "}\n";
    return out.str();
}

}  // namespace archon
