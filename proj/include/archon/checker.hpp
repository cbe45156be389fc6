#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "archon/buchi.hpp"
#include "archon/model.hpp"
#include "archon/psc.hpp"

namespace archon {

// One local state per component, indexed by component declaration order.
using GlobalState = std::vector<uint16_t>;

// A rendezvous step: sender and receiver fire together on a channel. End
// steps mark the stuttering of a terminal global state; they carry no
// channel or participants.
struct JointTransition {
    int channel = -1;
    std::string label;
    int sender = -1;
    int sender_transition = -1;  // index into the sender machine's transitions
    int receiver = -1;
    int receiver_transition = -1;
    bool is_end = false;
};

struct Step {
    JointTransition jt;
    GlobalState after;
};

GlobalState initial_state(const Architecture& arch);

// Joint steps enabled in `g`, ordered by channel declaration, then label,
// then sender transition declaration, then receiver transition declaration.
std::vector<Step> successors(const Architecture& arch, const GlobalState& g);

struct ExploreOptions {
    int state_cap = 1000000;
    int threads = 1;  // >1 expands each breadth level in parallel
};

// Reachable global-state graph in breadth-first discovery order.
struct StateGraph {
    struct Edge {
        int from = 0;
        JointTransition jt;
        int to = 0;
    };

    std::vector<GlobalState> states;  // discovery order; index is the id
    std::vector<Edge> edges;          // contiguous per source, sources ascending
    std::vector<std::pair<int, int>> edge_spans;  // per state: [begin, end)
    std::vector<int> deadlocks;     // sinks with some component non-final
    std::vector<int> terminations;  // sinks with every component final
    // Per component: local transition indices that fire on no reachable edge.
    std::vector<std::vector<int>> unfired;
};

// Throws CapExceeded when the reachable set outgrows opts.state_cap. The
// parallel path reproduces the serial discovery order exactly.
StateGraph explore(const Architecture& arch, const ExploreOptions& opts = {});

enum class CexKind { DeadlockTrace, SafetyPrefix, LivenessLasso };

struct Counterexample {
    CexKind kind = CexKind::DeadlockTrace;
    std::vector<Step> prefix;
    std::vector<Step> cycle;  // non-empty iff kind == LivenessLasso
};

// Shortest run into a deadlocked state, if any.
std::optional<Counterexample> check_deadlock(const Architecture& arch, const StateGraph& graph);

// Product of the state graph with a negation automaton. Terminal global
// states stutter on `end` so finite runs are judged as infinite ones.
struct ProductGraph {
    struct Node {
        int graph_state = 0;
        int ba_state = 0;
    };
    struct Edge {
        int from = 0;
        int graph_edge = -1;  // index into StateGraph::edges; -1 for end steps
        int to = 0;
    };

    std::vector<Node> nodes;  // breadth-first discovery order
    std::vector<Edge> edges;  // contiguous per source
    std::vector<std::pair<int, int>> edge_spans;
    std::vector<char> accepting;  // per node
    int diameter = 0;             // greatest breadth-first depth
};

ProductGraph build_product(const StateGraph& graph, const BuchiAutomaton& ba,
                           const EventAlphabet& alphabet);

// Shortest product path into the automaton's absorbing violation state.
std::optional<Counterexample> find_trap_prefix(const StateGraph& graph,
                                               const ProductGraph& product,
                                               const BuchiAutomaton& ba);

// Nested depth-first search for a reachable accepting cycle.
std::optional<Counterexample> find_accepting_cycle(const StateGraph& graph,
                                                   const ProductGraph& product);

enum class Verdict { Valid, Violated };

struct PropertyResult {
    Verdict verdict = Verdict::Valid;
    std::optional<Counterexample> cex;
    int graph_states = 0;
    int product_states = 0;
    int product_diameter = 0;
};

PropertyResult check_property(const Architecture& arch, const StateGraph& graph,
                              const BoundProperty& prop);
PropertyResult check_property(const Architecture& arch, const BoundProperty& prop,
                              const ExploreOptions& opts = {});

struct Trace {
    std::vector<Step> steps;
    bool hit_sink = false;
};

// Random walk with uniformly chosen enabled steps; reproducible per seed.
Trace simulate(const Architecture& arch, uint64_t seed, int max_steps);

std::string dump_trace(const Architecture& arch, const std::vector<Step>& steps);
std::string dump_counterexample(const Architecture& arch, const Counterexample& cex);

// Re-executes the steps against the architecture's joint-step semantics.
bool replay_counterexample(const Architecture& arch, const Counterexample& cex,
                           std::string* why = nullptr);

}  // namespace archon
