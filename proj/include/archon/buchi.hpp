#pragma once

#include <string>
#include <vector>

#include "archon/model.hpp"
#include "archon/psc.hpp"

namespace archon {

// Events are (label, channel) pairs plus a distinguished `end` event that
// labels the stutter self-loop of terminal global states.
class EventAlphabet {
public:
    struct Event {
        std::string label;
        int channel = -1;  // -1 only for `end`
        std::string channel_name;
    };

    // Events exchangeable by the architecture's machines, in channel
    // declaration order then first send-transition order, plus `end`.
    static EventAlphabet from_architecture(const Architecture& arch);
    // Synthetic alphabet for tests; `end` appended automatically.
    static EventAlphabet from_events(const std::vector<std::pair<std::string, std::string>>& evs);

    int find(const std::string& label, int channel) const;
    // Adds property events the machines never exchange; keeps `end` last.
    int ensure(const std::string& label, int channel, const std::string& channel_name);
    void ensure_property(const BoundProperty& prop, const Architecture& arch);

    int size() const { return static_cast<int>(events_.size()); }
    int end_event() const { return size() - 1; }
    const Event& event(int id) const { return events_[static_cast<size_t>(id)]; }
    std::string event_text(int id) const;

private:
    std::vector<Event> events_;
};

// Set of event ids over a fixed alphabet.
class EventSet {
public:
    EventSet() = default;
    explicit EventSet(int n) : bits_(static_cast<size_t>(n), 0) {}
    void set(int e) { bits_[static_cast<size_t>(e)] = 1; }
    void clear(int e) { bits_[static_cast<size_t>(e)] = 0; }
    bool test(int e) const { return bits_[static_cast<size_t>(e)] != 0; }
    int size() const { return static_cast<int>(bits_.size()); }
    bool empty() const;

private:
    std::vector<unsigned char> bits_;
};

// Deterministic, total tracker of precondition progress. States 0..k; state
// i means the first i precondition messages have matched. Fail-kind
// monitors add an absorbing violation state.
struct Monitor {
    int k = 0;  // precondition length; state k = complete match
    bool fail_kind = false;
    int violation_state = -1;  // fail kind only
    int n_states = 0;
    // table[state][event] -> state; total over the alphabet
    std::vector<std::vector<int>> table;

    int match_state() const { return k; }
    int step(int state, int event) const {
        return table[static_cast<size_t>(state)][static_cast<size_t>(event)];
    }
};

// Throws if a property event is missing from the alphabet.
Monitor build_monitor(const BoundProperty& prop, const EventAlphabet& alphabet);

// Negation automaton: accepts exactly the runs violating the property.
struct BuchiAutomaton {
    struct Edge {
        int src = 0;
        EventSet events;
        int dst = 0;
    };

    int n_states = 0;
    int initial = 0;
    int trap_state = -1;  // accepting absorbing violation state, if any
    std::vector<std::string> state_names;
    std::vector<bool> accepting;
    std::vector<Edge> edges;                  // construction order
    std::vector<std::vector<int>> out_edges;  // per state, indices into edges
};

BuchiAutomaton negate_to_buchi(const BoundProperty& prop, const EventAlphabet& alphabet);

// Whether some run over prefix followed by infinitely repeated cycle is
// accepted. The cycle must be non-empty.
bool accepts_lasso(const BuchiAutomaton& ba, const std::vector<int>& prefix,
                   const std::vector<int>& cycle);

// Finite maximal runs are extended with end-stuttering.
bool accepts_finite_run(const BuchiAutomaton& ba, const std::vector<int>& prefix,
                        const EventAlphabet& alphabet);

// One transition per line, construction order:
//   state -> state : {event,...} accepting
// with `accepting` marking transitions out of accepting states. The first
// line's source is the initial state.
std::string dump_automaton(const BuchiAutomaton& ba, const EventAlphabet& alphabet);

}  // namespace archon
