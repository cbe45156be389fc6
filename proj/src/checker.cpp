#include "archon/checker.hpp"

#include <algorithm>
#include <sstream>
#include <unordered_map>

namespace archon {

namespace {

struct SplitMix64 {
    uint64_t s;
    explicit SplitMix64(uint64_t seed) : s(seed) {}
    uint64_t next() {
        uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }
    // Uniform in [0, n); rejection keeps the draw exact on every platform.
    uint64_t below(uint64_t n) {
        uint64_t threshold = (~n + 1) % n;  // 2^64 mod n
        uint64_t r;
        do {
            r = next();
        } while (r < threshold);
        return r % n;
    }
};

struct StateHash {
    size_t operator()(const GlobalState& g) const {
        uint64_t h = 1469598103934665603ULL;
        for (uint16_t v : g) {
            h ^= v;
            h *= 1099511628211ULL;
        }
        return static_cast<size_t>(h);
    }
};

// Per-channel send/receive transition lists keyed by local state.
struct ArchIndex {
    const Architecture* arch;
    std::vector<const StateMachine*> machine;            // per component
    std::vector<std::vector<std::vector<int>>> send_on;  // [channel][local state]
    std::vector<std::vector<std::vector<int>>> recv_on;

    explicit ArchIndex(const Architecture& a) : arch(&a) {
        machine.resize(a.components.size());
        for (size_t c = 0; c < a.components.size(); ++c) {
            machine[c] = a.machine_for(static_cast<int>(c));
            if (!machine[c])
                throw Error("component '" + a.components[c].name + "' has no state machine");
        }
        send_on.resize(a.channels.size());
        recv_on.resize(a.channels.size());
        for (size_t ch = 0; ch < a.channels.size(); ++ch) {
            const StateMachine* sm = machine[static_cast<size_t>(a.channels[ch].source)];
            const StateMachine* rm = machine[static_cast<size_t>(a.channels[ch].target)];
            send_on[ch].resize(sm->states.size());
            recv_on[ch].resize(rm->states.size());
            for (size_t t = 0; t < sm->transitions.size(); ++t) {
                const Transition& tr = sm->transitions[t];
                if (tr.channel == static_cast<int>(ch) && tr.dir == Direction::Send)
                    send_on[ch][static_cast<size_t>(tr.from)].push_back(static_cast<int>(t));
            }
            for (size_t t = 0; t < rm->transitions.size(); ++t) {
                const Transition& tr = rm->transitions[t];
                if (tr.channel == static_cast<int>(ch) && tr.dir == Direction::Receive)
                    recv_on[ch][static_cast<size_t>(tr.from)].push_back(static_cast<int>(t));
            }
        }
    }

    void steps_from(const GlobalState& g, std::vector<Step>& out) const {
        out.clear();
        const Architecture& a = *arch;
        for (size_t ch = 0; ch < a.channels.size(); ++ch) {
            int sc = a.channels[ch].source;
            int tc = a.channels[ch].target;
            const StateMachine* sm = machine[static_cast<size_t>(sc)];
            const StateMachine* rm = machine[static_cast<size_t>(tc)];
            size_t channel_begin = out.size();
            for (int ti : send_on[ch][g[static_cast<size_t>(sc)]]) {
                const Transition& t = sm->transitions[static_cast<size_t>(ti)];
                for (int ri : recv_on[ch][g[static_cast<size_t>(tc)]]) {
                    const Transition& r = rm->transitions[static_cast<size_t>(ri)];
                    if (r.label != t.label) continue;
                    Step s;
                    s.jt = {static_cast<int>(ch), t.label, sc, ti, tc, ri, false};
                    s.after = g;
                    s.after[static_cast<size_t>(sc)] = static_cast<uint16_t>(t.to);
                    s.after[static_cast<size_t>(tc)] = static_cast<uint16_t>(r.to);
                    out.push_back(std::move(s));
                }
            }
            // Generation is sender-major; a stable sort leaves the
            // (sender, receiver) declaration order intact within a label.
            std::stable_sort(out.begin() + static_cast<long>(channel_begin), out.end(),
                             [](const Step& x, const Step& y) { return x.jt.label < y.jt.label; });
        }
    }

    bool all_final(const GlobalState& g) const {
        for (size_t c = 0; c < g.size(); ++c)
            if (!machine[c]->states[g[c]].is_final) return false;
        return true;
    }
};

std::string locals_text(const Architecture& arch, const GlobalState& g) {
    std::string out;
    for (size_t c = 0; c < g.size(); ++c) {
        if (c) out += " ";
        out += arch.machine_for(static_cast<int>(c))->states[g[c]].name;
    }
    return out;
}

void format_step(std::ostringstream& out, const Architecture& arch, int i, const Step& s) {
    out << "#" << i << " ";
    if (s.jt.is_end)
        out << "(end)";
    else
        out << s.jt.label << " on " << arch.channels[static_cast<size_t>(s.jt.channel)].name
            << " " << arch.components[static_cast<size_t>(s.jt.sender)].name << "->"
            << arch.components[static_cast<size_t>(s.jt.receiver)].name;
    out << " | " << locals_text(arch, s.after) << "\n";
}

}  // namespace

GlobalState initial_state(const Architecture& arch) {
    GlobalState g(arch.components.size(), 0);
    for (size_t c = 0; c < arch.components.size(); ++c) {
        const StateMachine* m = arch.machine_for(static_cast<int>(c));
        if (!m) throw Error("component '" + arch.components[c].name + "' has no state machine");
        g[c] = static_cast<uint16_t>(m->initial);
    }
    return g;
}

std::vector<Step> successors(const Architecture& arch, const GlobalState& g) {
    ArchIndex idx(arch);
    std::vector<Step> out;
    idx.steps_from(g, out);
    return out;
}

StateGraph explore(const Architecture& arch, const ExploreOptions& opts) {
    if (opts.state_cap < 1) throw CapExceeded("state cap 0 exceeded");
    ArchIndex idx(arch);
    StateGraph g;
    std::unordered_map<GlobalState, int, StateHash> ids;
    GlobalState init = initial_state(arch);
    g.states.push_back(init);
    ids.emplace(init, 0);

    auto intern = [&](const GlobalState& s) {
        auto it = ids.find(s);
        if (it != ids.end()) return it->second;
        if (static_cast<int>(g.states.size()) >= opts.state_cap)
            throw CapExceeded("state cap " + std::to_string(opts.state_cap) + " exceeded");
        int id = static_cast<int>(g.states.size());
        g.states.push_back(s);
        ids.emplace(s, id);
        return id;
    };

    if (opts.threads <= 1) {
        std::vector<Step> buf;
        for (size_t from = 0; from < g.states.size(); ++from) {
            idx.steps_from(g.states[from], buf);
            g.edge_spans.push_back({static_cast<int>(g.edges.size()), 0});
            for (const Step& s : buf)
                g.edges.push_back({static_cast<int>(from), s.jt, intern(s.after)});
            g.edge_spans.back().second = static_cast<int>(g.edges.size());
        }
    } else {
        // Frontier states expand in parallel; the serial merge below then
        // reassembles the exact serial discovery order.
        size_t level_begin = 0;
        while (level_begin < g.states.size()) {
            size_t level_end = g.states.size();
            std::vector<std::vector<Step>> bufs(level_end - level_begin);
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 16) num_threads(opts.threads)
#endif
            for (long i = 0; i < static_cast<long>(bufs.size()); ++i)
                idx.steps_from(g.states[level_begin + static_cast<size_t>(i)],
                               bufs[static_cast<size_t>(i)]);
            for (size_t i = 0; i < bufs.size(); ++i) {
                g.edge_spans.push_back({static_cast<int>(g.edges.size()), 0});
                for (const Step& s : bufs[i])
                    g.edges.push_back(
                        {static_cast<int>(level_begin + i), s.jt, intern(s.after)});
                g.edge_spans.back().second = static_cast<int>(g.edges.size());
            }
            level_begin = level_end;
        }
    }

    g.unfired.resize(arch.components.size());
    std::vector<std::vector<char>> fired(arch.components.size());
    for (size_t c = 0; c < arch.components.size(); ++c)
        fired[c].assign(idx.machine[c]->transitions.size(), 0);
    for (const auto& e : g.edges) {
        fired[static_cast<size_t>(e.jt.sender)][static_cast<size_t>(e.jt.sender_transition)] = 1;
        fired[static_cast<size_t>(e.jt.receiver)][static_cast<size_t>(e.jt.receiver_transition)] =
            1;
    }
    for (size_t c = 0; c < arch.components.size(); ++c)
        for (size_t t = 0; t < fired[c].size(); ++t)
            if (!fired[c][t]) g.unfired[c].push_back(static_cast<int>(t));

    for (size_t s = 0; s < g.states.size(); ++s) {
        if (g.edge_spans[s].first != g.edge_spans[s].second) continue;
        (idx.all_final(g.states[s]) ? g.terminations : g.deadlocks)
            .push_back(static_cast<int>(s));
    }
    return g;
}

std::optional<Counterexample> check_deadlock(const Architecture&, const StateGraph& graph) {
    if (graph.deadlocks.empty()) return std::nullopt;
    // Ids follow breadth-first discovery, so the smallest deadlock id is at
    // minimum distance; its breadth-first parent chain is a shortest run.
    int target = graph.deadlocks.front();
    std::vector<int> parent_edge(graph.states.size(), -1);
    std::vector<char> seen(graph.states.size(), 0);
    seen[0] = 1;
    std::vector<int> queue{0};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        auto [b, e] = graph.edge_spans[static_cast<size_t>(queue[qi])];
        for (int ei = b; ei < e; ++ei) {
            int to = graph.edges[static_cast<size_t>(ei)].to;
            if (seen[static_cast<size_t>(to)]) continue;
            seen[static_cast<size_t>(to)] = 1;
            parent_edge[static_cast<size_t>(to)] = ei;
            queue.push_back(to);
        }
    }
    std::vector<int> chain;
    for (int s = target; s != 0;) {
        int ei = parent_edge[static_cast<size_t>(s)];
        chain.push_back(ei);
        s = graph.edges[static_cast<size_t>(ei)].from;
    }
    std::reverse(chain.begin(), chain.end());
    Counterexample cex;
    cex.kind = CexKind::DeadlockTrace;
    for (int ei : chain) {
        const auto& e = graph.edges[static_cast<size_t>(ei)];
        cex.prefix.push_back({e.jt, graph.states[static_cast<size_t>(e.to)]});
    }
    return cex;
}

ProductGraph build_product(const StateGraph& graph, const BuchiAutomaton& ba,
                           const EventAlphabet& alphabet) {
    std::vector<int> edge_event(graph.edges.size());
    for (size_t i = 0; i < graph.edges.size(); ++i) {
        int e = alphabet.find(graph.edges[i].jt.label, graph.edges[i].jt.channel);
        if (e < 0)
            throw Error("event '" + graph.edges[i].jt.label + "' is missing from the alphabet");
        edge_event[i] = e;
    }
    const int end_ev = alphabet.end_event();

    ProductGraph p;
    auto key = [&](int gs, int bs) {
        return static_cast<uint64_t>(gs) * static_cast<uint64_t>(ba.n_states) +
               static_cast<uint64_t>(bs);
    };
    std::unordered_map<uint64_t, int> ids;
    std::vector<int> depth;
    p.nodes.push_back({0, ba.initial});
    p.accepting.push_back(ba.accepting[static_cast<size_t>(ba.initial)] ? 1 : 0);
    ids.emplace(key(0, ba.initial), 0);
    depth.push_back(0);

    auto intern = [&](int gs, int bs, int parent_depth) {
        auto [it, inserted] = ids.emplace(key(gs, bs), static_cast<int>(p.nodes.size()));
        if (inserted) {
            p.nodes.push_back({gs, bs});
            p.accepting.push_back(ba.accepting[static_cast<size_t>(bs)] ? 1 : 0);
            depth.push_back(parent_depth + 1);
        }
        return it->second;
    };

    for (size_t ni = 0; ni < p.nodes.size(); ++ni) {
        ProductGraph::Node node = p.nodes[ni];  // nodes may grow below
        int d = depth[ni];
        p.edge_spans.push_back({static_cast<int>(p.edges.size()), 0});
        auto [b, e] = graph.edge_spans[static_cast<size_t>(node.graph_state)];
        const auto& outs = ba.out_edges[static_cast<size_t>(node.ba_state)];
        if (b == e) {
            // Terminal global state: stutter on end.
            for (int bei : outs) {
                const auto& bedge = ba.edges[static_cast<size_t>(bei)];
                if (!bedge.events.test(end_ev)) continue;
                p.edges.push_back(
                    {static_cast<int>(ni), -1, intern(node.graph_state, bedge.dst, d)});
            }
        } else {
            for (int gei = b; gei < e; ++gei) {
                int ev = edge_event[static_cast<size_t>(gei)];
                int gto = graph.edges[static_cast<size_t>(gei)].to;
                for (int bei : outs) {
                    const auto& bedge = ba.edges[static_cast<size_t>(bei)];
                    if (!bedge.events.test(ev)) continue;
                    p.edges.push_back({static_cast<int>(ni), gei, intern(gto, bedge.dst, d)});
                }
            }
        }
        p.edge_spans.back().second = static_cast<int>(p.edges.size());
    }
    p.diameter = *std::max_element(depth.begin(), depth.end());
    return p;
}

namespace {

std::vector<Step> steps_of(const StateGraph& graph, const ProductGraph& product,
                           const std::vector<int>& product_edges) {
    std::vector<Step> out;
    for (int ei : product_edges) {
        const auto& pe = product.edges[static_cast<size_t>(ei)];
        Step s;
        if (pe.graph_edge >= 0) {
            s.jt = graph.edges[static_cast<size_t>(pe.graph_edge)].jt;
        } else {
            s.jt.is_end = true;
            s.jt.label = "end";
        }
        s.after = graph.states[static_cast<size_t>(
            product.nodes[static_cast<size_t>(pe.to)].graph_state)];
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace

std::optional<Counterexample> find_trap_prefix(const StateGraph& graph,
                                               const ProductGraph& product,
                                               const BuchiAutomaton& ba) {
    if (ba.trap_state < 0) return std::nullopt;
    int target = -1;
    for (size_t i = 0; i < product.nodes.size(); ++i)
        if (product.nodes[i].ba_state == ba.trap_state) {
            target = static_cast<int>(i);
            break;
        }
    if (target < 0) return std::nullopt;
    std::vector<int> parent_edge(product.nodes.size(), -1);
    std::vector<char> seen(product.nodes.size(), 0);
    seen[0] = 1;
    std::vector<int> queue{0};
    for (size_t qi = 0; qi < queue.size(); ++qi) {
        auto [b, e] = product.edge_spans[static_cast<size_t>(queue[qi])];
        for (int ei = b; ei < e; ++ei) {
            int to = product.edges[static_cast<size_t>(ei)].to;
            if (seen[static_cast<size_t>(to)]) continue;
            seen[static_cast<size_t>(to)] = 1;
            parent_edge[static_cast<size_t>(to)] = ei;
            queue.push_back(to);
        }
    }
    std::vector<int> chain;
    for (int n = target; n != 0;) {
        int ei = parent_edge[static_cast<size_t>(n)];
        chain.push_back(ei);
        n = product.edges[static_cast<size_t>(ei)].from;
    }
    std::reverse(chain.begin(), chain.end());
    Counterexample cex;
    cex.kind = CexKind::SafetyPrefix;
    cex.prefix = steps_of(graph, product, chain);
    return cex;
}

std::optional<Counterexample> find_accepting_cycle(const StateGraph& graph,
                                                   const ProductGraph& product) {
    const size_t n = product.nodes.size();
    std::vector<char> cyan(n, 0), blue(n, 0), red(n, 0);
    std::vector<int> pos_in_path(n, -1);

    struct Frame {
        int node;
        int next;  // offset within the node's edge span
    };
    std::vector<Frame> path;
    std::vector<int> path_via;  // product edge entering path[i]; -1 for the root
    std::vector<int> prefix_edges, cycle_edges;

    auto record = [&](int tpos, const std::vector<int>& tail) {
        // Cycle: blue path from position tpos to the top, then `tail`.
        prefix_edges.clear();
        for (size_t i = 1; i <= static_cast<size_t>(tpos); ++i)
            prefix_edges.push_back(path_via[i]);
        cycle_edges.clear();
        for (size_t i = static_cast<size_t>(tpos) + 1; i < path.size(); ++i)
            cycle_edges.push_back(path_via[i]);
        cycle_edges.insert(cycle_edges.end(), tail.begin(), tail.end());
    };

    // Search restricted to states reachable from an accepting state's
    // completed match: classic nested depth-first search, with the inner
    // (red) search looking for any state still on the outer (blue) stack.
    auto red_search = [&](int seed) -> bool {
        struct RFrame {
            int node;
            int next;
        };
        std::vector<RFrame> rpath;
        std::vector<int> rvia;
        red[static_cast<size_t>(seed)] = 1;
        rpath.push_back({seed, 0});
        rvia.push_back(-1);
        while (!rpath.empty()) {
            RFrame& f = rpath.back();
            auto [b, e] = product.edge_spans[static_cast<size_t>(f.node)];
            if (f.next < e - b) {
                int ei = b + f.next++;
                int to = product.edges[static_cast<size_t>(ei)].to;
                if (cyan[static_cast<size_t>(to)]) {
                    std::vector<int> tail;
                    for (size_t i = 1; i < rpath.size(); ++i) tail.push_back(rvia[i]);
                    tail.push_back(ei);
                    record(pos_in_path[static_cast<size_t>(to)], tail);
                    return true;
                }
                if (!red[static_cast<size_t>(to)]) {
                    red[static_cast<size_t>(to)] = 1;
                    rpath.push_back({to, 0});
                    rvia.push_back(ei);
                }
            } else {
                rpath.pop_back();
                rvia.pop_back();
            }
        }
        return false;
    };

    cyan[0] = 1;
    pos_in_path[0] = 0;
    path.push_back({0, 0});
    path_via.push_back(-1);
    while (!path.empty()) {
        Frame& f = path.back();
        auto [b, e] = product.edge_spans[static_cast<size_t>(f.node)];
        if (f.next < e - b) {
            int ei = b + f.next++;
            int to = product.edges[static_cast<size_t>(ei)].to;
            if (cyan[static_cast<size_t>(to)] &&
                (product.accepting[static_cast<size_t>(f.node)] ||
                 product.accepting[static_cast<size_t>(to)])) {
                record(pos_in_path[static_cast<size_t>(to)], {ei});
                Counterexample cex;
                cex.kind = CexKind::LivenessLasso;
                cex.prefix = steps_of(graph, product, prefix_edges);
                cex.cycle = steps_of(graph, product, cycle_edges);
                return cex;
            }
            if (!cyan[static_cast<size_t>(to)] && !blue[static_cast<size_t>(to)]) {
                cyan[static_cast<size_t>(to)] = 1;
                pos_in_path[static_cast<size_t>(to)] = static_cast<int>(path.size());
                path.push_back({to, 0});
                path_via.push_back(ei);
            }
        } else {
            int node = f.node;
            if (product.accepting[static_cast<size_t>(node)] && red_search(node)) {
                Counterexample cex;
                cex.kind = CexKind::LivenessLasso;
                cex.prefix = steps_of(graph, product, prefix_edges);
                cex.cycle = steps_of(graph, product, cycle_edges);
                return cex;
            }
            blue[static_cast<size_t>(node)] = 1;
            cyan[static_cast<size_t>(node)] = 0;
            pos_in_path[static_cast<size_t>(node)] = -1;
            path.pop_back();
            path_via.pop_back();
        }
    }
    return std::nullopt;
}

PropertyResult check_property(const Architecture& arch, const StateGraph& graph,
                              const BoundProperty& prop) {
    EventAlphabet alphabet = EventAlphabet::from_architecture(arch);
    alphabet.ensure_property(prop, arch);
    BuchiAutomaton ba = negate_to_buchi(prop, alphabet);
    ProductGraph product = build_product(graph, ba, alphabet);

    PropertyResult res;
    res.graph_states = static_cast<int>(graph.states.size());
    res.product_states = static_cast<int>(product.nodes.size());
    res.product_diameter = product.diameter;
    if (auto cex = find_trap_prefix(graph, product, ba)) {
        res.verdict = Verdict::Violated;
        res.cex = std::move(cex);
        return res;
    }
    if (auto cex = find_accepting_cycle(graph, product)) {
        res.verdict = Verdict::Violated;
        res.cex = std::move(cex);
        return res;
    }
    res.verdict = Verdict::Valid;
    return res;
}

PropertyResult check_property(const Architecture& arch, const BoundProperty& prop,
                              const ExploreOptions& opts) {
    StateGraph graph = explore(arch, opts);
    return check_property(arch, graph, prop);
}

Trace simulate(const Architecture& arch, uint64_t seed, int max_steps) {
    ArchIndex idx(arch);
    SplitMix64 rng(seed);
    Trace tr;
    GlobalState cur = initial_state(arch);
    std::vector<Step> buf;
    for (int i = 0; i < max_steps; ++i) {
        idx.steps_from(cur, buf);
        if (buf.empty()) {
            tr.hit_sink = true;
            break;
        }
        size_t pick = static_cast<size_t>(rng.below(buf.size()));
        tr.steps.push_back(buf[pick]);
        cur = tr.steps.back().after;
    }
    return tr;
}

std::string dump_trace(const Architecture& arch, const std::vector<Step>& steps) {
    std::ostringstream out;
    int i = 0;
    for (const Step& s : steps) format_step(out, arch, ++i, s);
    return out.str();
}

std::string dump_counterexample(const Architecture& arch, const Counterexample& cex) {
    std::ostringstream out;
    int i = 0;
    for (const Step& s : cex.prefix) format_step(out, arch, ++i, s);
    if (cex.kind == CexKind::LivenessLasso) {
        out << "--- cycle ---\n";
        for (const Step& s : cex.cycle) format_step(out, arch, ++i, s);
    }
    return out.str();
}

bool replay_counterexample(const Architecture& arch, const Counterexample& cex,
                           std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    ArchIndex idx(arch);
    GlobalState cur = initial_state(arch);
    std::vector<Step> buf;
    int i = 0;
    auto apply = [&](const Step& s) -> bool {
        ++i;
        idx.steps_from(cur, buf);
        if (s.jt.is_end) {
            if (!buf.empty())
                return fail("step " + std::to_string(i) + ": end step in a non-terminal state");
            if (s.after != cur)
                return fail("step " + std::to_string(i) + ": end step changes the state");
            return true;
        }
        for (const Step& cand : buf) {
            if (cand.jt.channel != s.jt.channel || cand.jt.label != s.jt.label ||
                cand.jt.sender_transition != s.jt.sender_transition ||
                cand.jt.receiver_transition != s.jt.receiver_transition)
                continue;
            if (!(cand.after == s.after))
                return fail("step " + std::to_string(i) + ": successor state mismatch");
            cur = cand.after;
            return true;
        }
        return fail("step " + std::to_string(i) + ": joint step not enabled");
    };
    for (const Step& s : cex.prefix)
        if (!apply(s)) return false;
    if (cex.kind == CexKind::LivenessLasso) {
        if (cex.cycle.empty()) return fail("liveness counterexample with an empty cycle");
        GlobalState anchor = cur;
        for (const Step& s : cex.cycle)
            if (!apply(s)) return false;
        if (!(cur == anchor)) return fail("cycle does not return to its starting state");
    } else {
        if (!cex.cycle.empty()) return fail("unexpected cycle steps");
        if (cex.kind == CexKind::DeadlockTrace) {
            idx.steps_from(cur, buf);
            if (!buf.empty()) return fail("deadlock trace ends in a non-terminal state");
            if (idx.all_final(cur)) return fail("deadlock trace ends in a termination state");
        }
    }
    if (why) why->clear();
    return true;
}

}  // namespace archon
