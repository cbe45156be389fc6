#pragma once

#include <string>
#include <vector>

#include "archon/diag.hpp"

namespace archon {

enum class Direction { Send, Receive };

struct Transition {
    int from = -1;   // state index within the owning machine
    int to = -1;     // state index within the owning machine
    std::string label;
    Direction dir = Direction::Send;
    int channel = -1;  // index into Architecture::channels
    SourcePos pos;
};

struct State {
    std::string name;
    bool is_final = false;
    SourcePos pos;
};

// One machine per component; owner is the component index.
struct StateMachine {
    int owner = -1;
    int initial = -1;  // state index
    std::vector<State> states;
    std::vector<Transition> transitions;
    SourcePos pos;

    int state_index(const std::string& name) const;
};

struct Component {
    std::string name;
    SourcePos pos;
};

struct Channel {
    std::string name;
    int source = -1;  // component index
    int target = -1;  // component index
    SourcePos pos;
};

struct Architecture {
    std::string name;
    std::vector<Component> components;
    std::vector<Channel> channels;
    std::vector<StateMachine> machines;  // parallel to components after validation

    int component_index(const std::string& name) const;
    int channel_index(const std::string& name) const;
    // Machine owned by component c, or nullptr.
    const StateMachine* machine_for(int c) const;
};

bool operator==(const Transition& a, const Transition& b);
bool operator==(const State& a, const State& b);
bool operator==(const StateMachine& a, const StateMachine& b);
bool operator==(const Component& a, const Component& b);
bool operator==(const Channel& a, const Channel& b);
bool operator==(const Architecture& a, const Architecture& b);

// Structural checks over an already-built value. Empty report iff the
// architecture satisfies every model invariant. Deterministic order.
ValidationReport validate(const Architecture& arch);

// Canonical source form; parse_architecture(pretty_print(a)) == a for valid a.
std::string pretty_print(const Architecture& arch);

}  // namespace archon
