#include "archon/declarative.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "archon/checker.hpp"

namespace archon {

DeclarativeConfig::DeclarativeConfig(const BoundProperty& prop) : prop_(&prop) { reset(); }

void DeclarativeConfig::reset() {
    q_ = 0;
    violated_ = false;
    threads_.clear();
    // An empty precondition matches once, at startup.
    if (!prop_->fail_kind && prop_->precondition.empty()) threads_.push_back({0, 0});
}

void DeclarativeConfig::spawn() {
    for (const Thread& t : threads_)
        if (t.progress == 0) return;  // an equal thread already tracks this future
    threads_.push_back({0, 0});
    std::sort(threads_.begin(), threads_.end(),
              [](const Thread& a, const Thread& b) { return a.progress < b.progress; });
}

void DeclarativeConfig::merge_threads() {
    std::sort(threads_.begin(), threads_.end(), [](const Thread& a, const Thread& b) {
        return a.progress != b.progress ? a.progress < b.progress : a.age > b.age;
    });
    size_t w = 0;
    for (size_t i = 0; i < threads_.size(); ++i)
        if (i == 0 || threads_[i].progress != threads_[w - 1].progress) threads_[w++] = threads_[i];
    threads_.resize(w);
}

void DeclarativeConfig::step(const MsgRef& e) {
    if (violated_) return;
    const auto& pre = prop_->precondition;
    const auto& cont = prop_->continuation;
    const int k = static_cast<int>(pre.size());
    const int m = static_cast<int>(cont.size());

    auto in_set = [&](const std::vector<MsgRef>& set) {
        for (const auto& u : set)
            if (u == e) return true;
        return false;
    };

    if (!prop_->fail_kind) {
        // Existing threads react first; a thread spawned by this very event
        // starts with the next one. Completing a step wins over that step's
        // unwanted set.
        size_t w = 0;
        for (size_t i = 0; i < threads_.size(); ++i) {
            Thread t = threads_[i];
            const BoundMessage& need = cont[static_cast<size_t>(t.progress)];
            if (e == need.msg) {
                ++t.progress;
                if (t.progress == m) continue;  // discharged
            } else if (in_set(need.unwanted)) {
                violated_ = true;
                return;
            }
            threads_[w++] = t;
        }
        threads_.resize(w);
        merge_threads();
    }

    if (k == 0) {
        if (prop_->fail_kind && e == cont.front().msg) violated_ = true;
        return;
    }
    if (q_ < k) {
        const BoundMessage& exp = pre[static_cast<size_t>(q_)];
        if (e == exp.msg) {
            ++q_;
            if (q_ == k && !prop_->fail_kind) spawn();
        } else if (in_set(exp.unwanted)) {
            q_ = e == pre.front().msg ? 1 : 0;
        }
        return;
    }
    // Armed: the whole precondition has matched.
    if (prop_->fail_kind) {
        const BoundMessage& fail = cont.front();
        if (e == pre.front().msg)
            q_ = 1;
        else if (e == fail.msg)
            violated_ = true;
        else if (in_set(fail.unwanted))
            q_ = 0;
    } else {
        if (e == pre.front().msg) {
            q_ = 1;
            // A one-message precondition re-matches while armed.
            if (k == 1) spawn();
        } else if (in_set(pre.front().unwanted)) {
            q_ = 0;
        }
    }
}

void DeclarativeConfig::boundary() {
    for (Thread& t : threads_) ++t.age;
}

bool DeclarativeConfig::stalled() const {
    const int m = static_cast<int>(prop_->continuation.size());
    for (const Thread& t : threads_)
        if (t.age >= m + 2) return true;
    return false;
}

std::string DeclarativeConfig::key() const {
    std::ostringstream out;
    out << q_;
    for (const Thread& t : threads_) out << "|" << t.progress << ":" << t.age;
    return out.str();
}

namespace {

// Whether iterating `gamma` forever from `cfg` violates: a thread traps, or
// one stalls, i.e. survives enough whole periods that its progress must
// repeat across a period. A repeated boundary key means neither can happen.
bool lasso_violates_from(DeclarativeConfig cfg, const std::vector<MsgRef>& gamma) {
    std::set<std::string> seen;
    for (;;) {
        if (!seen.insert(cfg.key()).second) return false;
        for (const auto& e : gamma) {
            cfg.step(e);
            if (cfg.violated()) return true;
        }
        cfg.boundary();
        if (cfg.stalled()) return true;
    }
}

}  // namespace

bool run_violates(const BoundProperty& prop, const std::vector<MsgRef>& prefix,
                  const std::vector<MsgRef>& cycle) {
    DeclarativeConfig cfg(prop);
    for (const auto& e : prefix) {
        cfg.step(e);
        if (cfg.violated()) return true;
    }
    if (cycle.empty()) return cfg.pending();
    return lasso_violates_from(cfg, cycle);
}

BruteVerdict brute_force_verdict(const Architecture& arch, const BoundProperty& prop,
                                 const BruteForceOptions& opts) {
    ExploreOptions eo;
    eo.state_cap = opts.state_cap;
    StateGraph graph = explore(arch, eo);

    const int k = static_cast<int>(prop.precondition.size());
    const int m = static_cast<int>(prop.continuation.size());
    // Revisits beyond this add no new monitor or thread situations.
    const int mult_cap = 2 * (k + m + 3) + 2;

    std::vector<MsgRef> edge_event(graph.edges.size());
    for (size_t i = 0; i < graph.edges.size(); ++i)
        edge_event[i] = {graph.edges[i].jt.label, graph.edges[i].jt.channel};

    struct Frame {
        int state;
        int next;  // offset into the state's edge span
        DeclarativeConfig cfg;
    };
    std::vector<Frame> walk;
    std::vector<MsgRef> walk_events;  // event entering walk[i]; [0] unused
    std::vector<int> occurrences(graph.states.size(), 0);
    long budget = opts.node_budget;

    // Judges a freshly entered walk position: violations on the way in,
    // pending obligations at a terminal state, and every lasso this position
    // closes.
    auto on_enter = [&](int fi) -> bool {
        if (--budget < 0) throw CapExceeded("bound exceeded");
        const Frame& f = walk[static_cast<size_t>(fi)];
        if (f.cfg.violated()) return true;
        auto [b, e] = graph.edge_spans[static_cast<size_t>(f.state)];
        if (b == e && f.cfg.pending()) return true;
        for (int i = 0; i < fi; ++i) {
            if (walk[static_cast<size_t>(i)].state != f.state) continue;
            std::vector<MsgRef> gamma(walk_events.begin() + i + 1, walk_events.begin() + fi + 1);
            if (lasso_violates_from(f.cfg, gamma)) return true;
        }
        return false;
    };

    walk.push_back({0, 0, DeclarativeConfig(prop)});
    walk_events.push_back({});
    occurrences[0] = 1;
    if (on_enter(0)) return BruteVerdict::Violated;

    while (!walk.empty()) {
        Frame& f = walk.back();
        auto [b, e] = graph.edge_spans[static_cast<size_t>(f.state)];
        bool at_depth = static_cast<int>(walk.size()) - 1 >= opts.depth_bound;
        if (!at_depth && f.next < e - b) {
            int ei = b + f.next++;
            int to = graph.edges[static_cast<size_t>(ei)].to;
            if (occurrences[static_cast<size_t>(to)] >= mult_cap) continue;
            DeclarativeConfig cfg = f.cfg;
            cfg.step(edge_event[static_cast<size_t>(ei)]);
            ++occurrences[static_cast<size_t>(to)];
            walk.push_back({to, 0, std::move(cfg)});
            walk_events.push_back(edge_event[static_cast<size_t>(ei)]);
            if (on_enter(static_cast<int>(walk.size()) - 1)) return BruteVerdict::Violated;
        } else {
            --occurrences[static_cast<size_t>(f.state)];
            walk.pop_back();
            walk_events.pop_back();
        }
    }
    return BruteVerdict::Valid;
}

}  // namespace archon
