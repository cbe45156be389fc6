#include "archon/codegen.hpp"

// Embedded copy of templates/default/. A test keeps the two in sync.

namespace archon {

namespace {

const char* const kComponentTpl = R"TPL(#pragma once

#include <cstdio>
#include <functional>

{{#machines}}
#include "SM_{{name}}.hpp"
{{/machines}}

{{#requires_ports}}
// Requires port {{name}}: calls are wired to the providing peer by MAIN.
struct {{name}}_port {
{{#methods}}
    std::function<void()> {{label}};
{{/methods}}
};

{{/requires_ports}}
// Component {{component}}.
{{#provides_ports}}
// port {{name}} provides {{methods_joined}}
{{/provides_ports}}
{{#requires_ports}}
// port {{name}} requires {{methods_joined}}
{{/requires_ports}}
class {{component}} {
public:
{{#machines}}
    SM_{{name}}* behaviour_{{name}} = nullptr;
{{/machines}}
{{#requires_ports}}

    {{name}}_port {{name}};
{{/requires_ports}}
{{#provides_ports}}
{{#methods}}

    void {{label}}() {
        std::printf("{{component}}.{{label}}\n");
        behaviour_{{component}}->transFire(behaviour_{{component}}->T_{{label}});
        behaviour_{{peer}}->transFire(behaviour_{{peer}}->T_{{label}});
        //WRITE YOUR CODE HERE
        //END YOUR CODE HERE
    }
{{/methods}}
{{/provides_ports}}
};
)TPL";

const char* const kStateMachineTpl = R"TPL(#pragma once

#include <stdexcept>
#include <string>

#ifndef ARCHGEN_PROTOCOL_VIOLATION_DEFINED
#define ARCHGEN_PROTOCOL_VIOLATION_DEFINED
// Thrown when a call would fire a transition the protocol does not admit.
struct ProtocolViolation : std::runtime_error {
    explicit ProtocolViolation(const std::string& what) : std::runtime_error(what) {}
};
#endif

// State machine of component {{component}}, kept as an adjacency list: the
// entries of state i live in entries[offsets[i]] up to entries[offsets[i + 1]].
class SM_{{component}} {
public:
{{#states}}
    static constexpr int S_{{sname}} = {{value}};
{{/states}}
{{#has_transitions}}

{{#transitions}}
    static constexpr int T_{{label}} = {{value}};
{{/transitions}}
{{/has_transitions}}

    // Transition constant, target state, 0 = send / 1 = receive.
    struct Entry {
        int t;
        int target;
        int flag;
    };

    int current = S_{{initial}};

    void transFire(int t) {
        for (int i = offsets[current]; i < offsets[current + 1]; ++i) {
            if (entries[i].t == t) {
                current = entries[i].target;
                return;
            }
        }
        throw ProtocolViolation("SM_{{component}}: transition " + std::to_string(t) +
                                " not allowed in state " + std::to_string(current));
    }

private:
{{#has_entries}}
    static constexpr Entry entries[{{n_entries}}] = {
{{#entries}}
        {{text}}
{{/entries}}
    };
{{/has_entries}}
{{^has_entries}}
    // No transitions: every fire is a violation.
    static constexpr Entry entries[1] = { {-1, -1, 0} };
{{/has_entries}}
    static constexpr int offsets[{{n_offsets}}] = { {{offsets_joined}} };
};
)TPL";

const char* const kMainTpl = R"TPL(#include <cstdio>

{{#components}}
#include "{{name}}.hpp"
{{/components}}

int main() {
{{#components}}
    SM_{{name}} sm_{{name}};
{{/components}}

{{#components}}
    {{name}} c_{{name}};
{{/components}}

    // Every component observes the shared machine instances.
{{#components}}
{{#machines}}
    c_{{comp}}.behaviour_{{name}} = &sm_{{name}};
{{/machines}}
{{/components}}
{{#has_wirings}}

    // Requires ports call straight into the providing peer.
{{#wirings}}
    c_{{src}}.{{port}}.{{label}} = [&] { c_{{dst}}.{{label}}(); };
{{/wirings}}
{{/has_wirings}}

    try {
        //WRITE YOUR CODE HERE
        //END YOUR CODE HERE
    } catch (const ProtocolViolation& ex) {
        std::fprintf(stderr, "protocol violation: %s\n", ex.what());
        return 1;
    }
    std::printf("run complete\n");
    return 0;
}
)TPL";

}  // namespace

TemplateSet default_templates() {
    TemplateSet t;
    t.component = kComponentTpl;
    t.state_machine = kStateMachineTpl;
    t.main = kMainTpl;
    t.component_ext = "hpp";
    t.state_machine_ext = "hpp";
    t.main_ext = "cpp";
    t.region_anchors = {
        {"^\\s*void ([A-Za-z_][A-Za-z0-9_]*)\\(\\) \\{$", "$1"},
        {"^int main\\(", "main"},
    };
    return t;
}

}  // namespace archon
