#include "archon/buchi.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace archon {

EventAlphabet EventAlphabet::from_architecture(const Architecture& arch) {
    EventAlphabet a;
    for (size_t c = 0; c < arch.channels.size(); ++c) {
        const Channel& ch = arch.channels[c];
        const StateMachine* sm = arch.machine_for(ch.source);
        const StateMachine* rm = arch.machine_for(ch.target);
        if (!sm || !rm) continue;
        for (const auto& t : sm->transitions) {
            if (t.channel != static_cast<int>(c) || t.dir != Direction::Send) continue;
            bool received = false;
            for (const auto& r : rm->transitions)
                if (r.channel == static_cast<int>(c) && r.dir == Direction::Receive &&
                    r.label == t.label) {
                    received = true;
                    break;
                }
            if (received && a.find(t.label, static_cast<int>(c)) < 0)
                a.events_.push_back({t.label, static_cast<int>(c), ch.name});
        }
    }
    a.events_.push_back({"end", -1, ""});
    return a;
}

EventAlphabet EventAlphabet::from_events(
    const std::vector<std::pair<std::string, std::string>>& evs) {
    EventAlphabet a;
    int chan = 0;
    for (const auto& [label, channel_name] : evs)
        a.events_.push_back({label, chan++, channel_name});
    a.events_.push_back({"end", -1, ""});
    return a;
}

int EventAlphabet::find(const std::string& label, int channel) const {
    for (size_t i = 0; i < events_.size(); ++i)
        if (events_[i].channel == channel && events_[i].label == label)
            return static_cast<int>(i);
    return -1;
}

int EventAlphabet::ensure(const std::string& label, int channel, const std::string& channel_name) {
    int found = find(label, channel);
    if (found >= 0) return found;
    events_.insert(events_.end() - 1, {label, channel, channel_name});
    return size() - 2;
}

void EventAlphabet::ensure_property(const BoundProperty& prop, const Architecture& arch) {
    auto add = [&](const MsgRef& m) {
        ensure(m.label, m.channel, arch.channels[static_cast<size_t>(m.channel)].name);
    };
    for (const auto& messages : {prop.precondition, prop.continuation})
        for (const auto& bm : messages) {
            add(bm.msg);
            for (const auto& u : bm.unwanted) add(u);
        }
}

std::string EventAlphabet::event_text(int id) const {
    const Event& e = event(id);
    if (e.channel < 0) return e.label;
    return e.label + "@" + e.channel_name;
}

bool EventSet::empty() const {
    for (unsigned char b : bits_)
        if (b) return false;
    return true;
}

namespace {

int event_of(const MsgRef& m, const EventAlphabet& alphabet, const std::string& prop_name) {
    int e = alphabet.find(m.label, m.channel);
    if (e < 0)
        throw Error("property '" + prop_name + "': event '" + m.label +
                    "' is not in the alphabet");
    return e;
}

}  // namespace

Monitor build_monitor(const BoundProperty& prop, const EventAlphabet& alphabet) {
    Monitor mon;
    mon.k = static_cast<int>(prop.precondition.size());
    mon.fail_kind = prop.fail_kind;
    mon.n_states = mon.k + 1 + (prop.fail_kind ? 1 : 0);
    if (prop.fail_kind) mon.violation_state = mon.k + 1;

    const int n_events = alphabet.size();
    std::vector<int> pre_events;
    std::vector<EventSet> pre_unwanted;
    for (const auto& bm : prop.precondition) {
        pre_events.push_back(event_of(bm.msg, alphabet, prop.name));
        EventSet set(n_events);
        for (const auto& u : bm.unwanted) set.set(event_of(u, alphabet, prop.name));
        pre_unwanted.push_back(set);
    }

    mon.table.assign(static_cast<size_t>(mon.n_states),
                     std::vector<int>(static_cast<size_t>(n_events), 0));

    // States 0..k-1: advance on the expected message, reset on its unwanted
    // set (to 1 when the event restarts a match), otherwise self-loop.
    for (int i = 0; i < mon.k; ++i) {
        for (int e = 0; e < n_events; ++e) {
            int next;
            if (e == pre_events[static_cast<size_t>(i)])
                next = i + 1;
            else if (pre_unwanted[static_cast<size_t>(i)].test(e))
                next = e == pre_events[0] ? 1 : 0;
            else
                next = i;
            mon.table[static_cast<size_t>(i)][static_cast<size_t>(e)] = next;
        }
    }

    // State k: completed match. A new occurrence of the first precondition
    // message restarts matching; a fail event flags the violation; an event
    // unwanted before the fail (or before a re-match) resets.
    if (prop.fail_kind) {
        const BoundMessage& fail = prop.continuation.front();
        int fail_event = event_of(fail.msg, alphabet, prop.name);
        EventSet fail_unwanted(n_events);
        for (const auto& u : fail.unwanted) fail_unwanted.set(event_of(u, alphabet, prop.name));
        for (int e = 0; e < n_events; ++e) {
            int next;
            if (mon.k > 0 && e == pre_events[0])
                next = 1;
            else if (e == fail_event)
                next = mon.violation_state;
            else if (fail_unwanted.test(e))
                next = 0;
            else
                next = mon.k;
            mon.table[static_cast<size_t>(mon.k)][static_cast<size_t>(e)] = next;
        }
        for (int e = 0; e < n_events; ++e)
            mon.table[static_cast<size_t>(mon.violation_state)][static_cast<size_t>(e)] =
                mon.violation_state;
    } else {
        for (int e = 0; e < n_events; ++e) {
            int next;
            if (mon.k > 0 && e == pre_events[0])
                next = 1;
            else if (mon.k > 0 && pre_unwanted[0].test(e))
                next = 0;
            else
                next = mon.k;
            mon.table[static_cast<size_t>(mon.k)][static_cast<size_t>(e)] = next;
        }
    }
    return mon;
}

namespace {

// Emits one edge per (src, target) group; groups ordered by their first
// event id so dumps are stable.
void emit_state_edges(BuchiAutomaton& ba, int src, const std::vector<int>& target_by_event) {
    const int n_events = static_cast<int>(target_by_event.size());
    std::vector<int> order;
    std::map<int, EventSet> groups;
    for (int e = 0; e < n_events; ++e) {
        int dst = target_by_event[static_cast<size_t>(e)];
        if (dst < 0) continue;  // the run dies on this event
        auto it = groups.find(dst);
        if (it == groups.end()) {
            groups.emplace(dst, EventSet(n_events)).first->second.set(e);
            order.push_back(dst);
        } else {
            it->second.set(e);
        }
    }
    for (int dst : order) ba.edges.push_back({src, groups.at(dst), dst});
}

void finish_automaton(BuchiAutomaton& ba) {
    ba.out_edges.assign(static_cast<size_t>(ba.n_states), {});
    for (size_t i = 0; i < ba.edges.size(); ++i)
        ba.out_edges[static_cast<size_t>(ba.edges[i].src)].push_back(static_cast<int>(i));
}

}  // namespace

BuchiAutomaton negate_to_buchi(const BoundProperty& prop, const EventAlphabet& alphabet) {
    const Monitor mon = build_monitor(prop, alphabet);
    const int n_events = alphabet.size();
    const int k = mon.k;
    BuchiAutomaton ba;

    if (prop.fail_kind) {
        // Monitor plus an accepting absorbing trap replacing the violation
        // flag state.
        ba.n_states = mon.n_states;
        ba.initial = 0;
        ba.trap_state = mon.violation_state;
        for (int i = 0; i <= k; ++i) ba.state_names.push_back("q" + std::to_string(i));
        ba.state_names.push_back("trap");
        ba.accepting.assign(static_cast<size_t>(ba.n_states), false);
        ba.accepting[static_cast<size_t>(ba.trap_state)] = true;
        for (int s = 0; s < ba.n_states; ++s)
            emit_state_edges(ba, s, mon.table[static_cast<size_t>(s)]);
        finish_automaton(ba);
        return ba;
    }

    const int m = static_cast<int>(prop.continuation.size());
    std::vector<int> req_events;
    std::vector<EventSet> req_unwanted;
    for (const auto& bm : prop.continuation) {
        req_events.push_back(event_of(bm.msg, alphabet, prop.name));
        EventSet set(n_events);
        for (const auto& u : bm.unwanted) set.set(event_of(u, alphabet, prop.name));
        req_unwanted.push_back(set);
    }

    // With an empty precondition the single match happens at startup, so the
    // automaton is just the obligation chain.
    const bool has_monitor_part = k > 0;
    const int first_o = has_monitor_part ? k + 1 : 0;
    ba.n_states = first_o + m + 1;
    ba.trap_state = first_o + m;
    ba.initial = has_monitor_part ? 0 : first_o;
    if (has_monitor_part)
        for (int i = 0; i <= k; ++i) ba.state_names.push_back("q" + std::to_string(i));
    for (int j = 1; j <= m; ++j) ba.state_names.push_back("o" + std::to_string(j));
    ba.state_names.push_back("trap");
    ba.accepting.assign(static_cast<size_t>(ba.n_states), false);
    for (int j = 0; j <= m; ++j) ba.accepting[static_cast<size_t>(first_o + j)] = true;

    if (has_monitor_part) {
        int match_event = event_of(prop.precondition.back().msg, alphabet, prop.name);
        for (int s = 0; s <= k; ++s) {
            emit_state_edges(ba, s, mon.table[static_cast<size_t>(s)]);
            // Nondeterministic branch: each completed match may be the one
            // whose obligation never completes. A match enters state k from
            // k-1; with a one-message precondition the armed state re-matches
            // on that same message, so it branches too.
            if (s == k - 1 || (k == 1 && s == k)) {
                EventSet branch(n_events);
                branch.set(match_event);
                ba.edges.push_back({s, branch, first_o});
            }
        }
    }

    for (int j = 0; j < m; ++j) {
        std::vector<int> row(static_cast<size_t>(n_events), first_o + j);
        for (int e = 0; e < n_events; ++e)
            if (req_unwanted[static_cast<size_t>(j)].test(e)) row[static_cast<size_t>(e)] = ba.trap_state;
        // Advance wins over unwanted; completing the chain kills the run.
        row[static_cast<size_t>(req_events[static_cast<size_t>(j)])] =
            j + 1 < m ? first_o + j + 1 : -1;
        emit_state_edges(ba, first_o + j, row);
    }
    std::vector<int> trap_row(static_cast<size_t>(n_events), ba.trap_state);
    emit_state_edges(ba, ba.trap_state, trap_row);
    finish_automaton(ba);
    return ba;
}

bool accepts_lasso(const BuchiAutomaton& ba, const std::vector<int>& prefix,
                   const std::vector<int>& cycle) {
    if (cycle.empty()) throw Error("accepts_lasso: cycle must be non-empty");
    const int plen = static_cast<int>(prefix.size());
    const int total = plen + static_cast<int>(cycle.size());
    auto event_at = [&](int pos) {
        return pos < plen ? prefix[static_cast<size_t>(pos)]
                          : cycle[static_cast<size_t>(pos - plen)];
    };
    auto next_pos = [&](int pos) { return pos + 1 < total ? pos + 1 : plen; };

    // Product of the automaton with the lasso positions; accepted iff a
    // reachable accepting node in the cycle region can reach itself.
    const int n_nodes = ba.n_states * total;
    auto node = [&](int s, int pos) { return s * total + pos; };
    std::vector<char> reachable(static_cast<size_t>(n_nodes), 0);
    std::vector<int> stack;
    auto push = [&](int v) {
        if (!reachable[static_cast<size_t>(v)]) {
            reachable[static_cast<size_t>(v)] = 1;
            stack.push_back(v);
        }
    };
    push(node(ba.initial, 0));
    while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        int s = v / total;
        int pos = v % total;
        int e = event_at(pos);
        for (int ei : ba.out_edges[static_cast<size_t>(s)]) {
            const auto& edge = ba.edges[static_cast<size_t>(ei)];
            if (edge.events.test(e)) push(node(edge.dst, next_pos(pos)));
        }
    }

    for (int s = 0; s < ba.n_states; ++s) {
        if (!ba.accepting[static_cast<size_t>(s)]) continue;
        for (int pos = plen; pos < total; ++pos) {
            int start = node(s, pos);
            if (!reachable[static_cast<size_t>(start)]) continue;
            // DFS for a path back to start.
            std::vector<char> seen(static_cast<size_t>(n_nodes), 0);
            std::vector<int> dfs{start};
            bool found = false;
            while (!dfs.empty() && !found) {
                int v = dfs.back();
                dfs.pop_back();
                int vs = v / total;
                int vpos = v % total;
                int e = event_at(vpos);
                for (int ei : ba.out_edges[static_cast<size_t>(vs)]) {
                    const auto& edge = ba.edges[static_cast<size_t>(ei)];
                    if (!edge.events.test(e)) continue;
                    int w = node(edge.dst, next_pos(vpos));
                    if (w == start) {
                        found = true;
                        break;
                    }
                    if (!seen[static_cast<size_t>(w)]) {
                        seen[static_cast<size_t>(w)] = 1;
                        dfs.push_back(w);
                    }
                }
            }
            if (found) return true;
        }
    }
    return false;
}

bool accepts_finite_run(const BuchiAutomaton& ba, const std::vector<int>& prefix,
                        const EventAlphabet& alphabet) {
    return accepts_lasso(ba, prefix, {alphabet.end_event()});
}

std::string dump_automaton(const BuchiAutomaton& ba, const EventAlphabet& alphabet) {
    std::ostringstream out;
    for (const auto& edge : ba.edges) {
        out << ba.state_names[static_cast<size_t>(edge.src)] << " -> "
            << ba.state_names[static_cast<size_t>(edge.dst)] << " : {";
        bool first = true;
        for (int e = 0; e < edge.events.size(); ++e) {
            if (!edge.events.test(e)) continue;
            if (!first) out << ",";
            first = false;
            out << alphabet.event_text(e);
        }
        out << "}";
        if (ba.accepting[static_cast<size_t>(edge.src)]) out << " accepting";
        out << "\n";
    }
    return out.str();
}

}  // namespace archon
