#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "archon/checker.hpp"
#include "archon/declarative.hpp"
#include "support/mutations.hpp"
#include "support/random_gen.hpp"
#include "support/scc_detector.hpp"
#include "support/testing.hpp"

using namespace archon;
namespace at = archon::testing;

namespace {

BoundProperty toy_prop(const Architecture& arch, const std::string& text) {
    return bind(parse_properties(text)[0], arch).property;
}

}  // namespace

TEST_CASE("initial state takes every machine's declared initial") {
    Architecture arch = at::load_arch("atm.adl");
    GlobalState g = initial_state(arch);
    REQUIRE(g.size() == 4);
    CHECK(g == GlobalState{0, 0, 0, 0});
}

TEST_CASE("successor order is channel, label, sender, receiver declaration order") {
    // Two channels, both ready to fire; the second channel's ready label
    // sorts behind every ready label of the first, and within one (channel,
    // label) pair sender declaration order ranks first, receiver second.
    std::string adl = "architecture Ord {\n"
                      "  component A;\n  component B;\n"
                      "  channel c1 from A to B;\n  channel c2 from B to A;\n"
                      "  statemachine A {\n    initial a0;\n    state a0;\n    state a1;\n"
                      "    a0 -> a1 : send z on c1;\n"
                      "    a0 -> a0 : send m on c1;\n"
                      "    a0 -> a1 : send m on c1;\n"
                      "    a0 -> a0 : recv r on c2;\n  }\n"
                      "  statemachine B {\n    initial b0;\n    state b0;\n    state b1;\n"
                      "    b0 -> b1 : recv m on c1;\n"
                      "    b0 -> b0 : recv m on c1;\n"
                      "    b0 -> b0 : recv z on c1;\n"
                      "    b0 -> b0 : send r on c2;\n  }\n"
                      "}\n";
    Architecture arch = parse_architecture(adl);
    REQUIRE(validate(arch).empty());
    std::vector<Step> ss = successors(arch, initial_state(arch));
    REQUIRE(ss.size() == 6);
    // Channel c1 first; labels lexicographic: m before z. Sender transition
    // declaration order, then receiver declaration order.
    auto sig = [&](const Step& s) {
        return std::vector<int>{s.jt.channel, s.jt.sender_transition, s.jt.receiver_transition};
    };
    CHECK(ss[0].jt.label == "m");
    CHECK(sig(ss[0]) == std::vector<int>{0, 1, 0});
    CHECK(sig(ss[1]) == std::vector<int>{0, 1, 1});
    CHECK(sig(ss[2]) == std::vector<int>{0, 2, 0});
    CHECK(sig(ss[3]) == std::vector<int>{0, 2, 1});
    CHECK(ss[4].jt.label == "z");
    CHECK(sig(ss[4]) == std::vector<int>{0, 0, 2});
    CHECK(ss[5].jt.label == "r");
    CHECK(sig(ss[5]) == std::vector<int>{1, 3, 3});
    // A send with no matching receive is not a step.
    CHECK(std::none_of(ss.begin(), ss.end(), [](const Step& s) { return s.jt.is_end; }));
}

TEST_CASE("rendezvous needs matching label, channel, and direction") {
    std::string adl = "architecture N {\n"
                      "  component A;\n  component B;\n"
                      "  channel c from A to B;\n"
                      "  statemachine A {\n    initial a0;\n    state a0;\n"
                      "    a0 -> a0 : send m on c;\n  }\n"
                      "  statemachine B {\n    initial b0;\n    state b0;\n"
                      "    b0 -> b0 : recv other on c;\n  }\n"
                      "}\n";
    Architecture arch = parse_architecture(adl);
    CHECK(successors(arch, initial_state(arch)).empty());
}

TEST_CASE("toy graph is a two-state loop") {
    Architecture arch = at::load_arch("toy.adl");
    StateGraph g = explore(arch);
    REQUIRE(g.states.size() == 2);
    CHECK(g.states[0] == GlobalState{0, 0});
    CHECK(g.states[1] == GlobalState{1, 1});
    REQUIRE(g.edges.size() == 2);
    CHECK(g.edges[0].jt.label == "m1");
    CHECK(g.edges[1].jt.label == "m2");
    CHECK(g.edge_spans == std::vector<std::pair<int, int>>{{0, 1}, {1, 2}});
    CHECK(g.deadlocks.empty());
    CHECK(g.terminations.empty());
    CHECK(g.unfired == std::vector<std::vector<int>>{{}, {}});
}

TEST_CASE("cash machine graph matches its frozen size") {
    Architecture arch = at::load_arch("atm.adl");
    StateGraph g = explore(arch);
    CHECK(g.states.size() == 21);
    CHECK(g.edges.size() == 28);
    CHECK(g.deadlocks.empty());
    CHECK(g.terminations.empty());
    for (const auto& u : g.unfired) CHECK(u.empty());
    // Breadth-first: state 0 is initial, state 1 its only successor.
    CHECK(g.states[0] == GlobalState{0, 0, 0, 0});
    REQUIRE(g.edge_spans[0].second - g.edge_spans[0].first == 1);
    CHECK(g.edges[0].jt.label == "login");
}

TEST_CASE("unfired transitions are reported per machine") {
    Architecture arch = at::load_arch("atm.adl");
    at::drop(arch, "User", "logout", Direction::Send, "logged_in");  // strands eject
    StateGraph g = explore(arch);
    CHECK(!g.deadlocks.empty());
    // TM's eject -> idle logout receive can never fire any more.
    const StateMachine& tm = at::machine_of(arch, "TM");
    bool found = false;
    for (int ti : g.unfired[1])
        found = found || tm.transitions[static_cast<size_t>(ti)].label == "logout";
    CHECK(found);
}

TEST_CASE("state cap aborts instead of truncating") {
    Architecture arch = at::load_arch("atm.adl");
    ExploreOptions opts;
    opts.state_cap = 5;
    CHECK_THROWS_AS(explore(arch, opts), CapExceeded);
}

TEST_CASE("parallel exploration reproduces the serial graph exactly") {
    std::mt19937_64 rng(20260817);
    for (int round = 0; round < 30; ++round) {
        Architecture arch = at::random_architecture(rng);
        if (!validate(arch).empty()) continue;
        ExploreOptions serial;
        ExploreOptions par;
        par.threads = 4;
        StateGraph a = explore(arch, serial);
        StateGraph b = explore(arch, par);
        CAPTURE(round);
        REQUIRE(a.states == b.states);
        REQUIRE(a.edge_spans == b.edge_spans);
        REQUIRE(a.deadlocks == b.deadlocks);
        REQUIRE(a.terminations == b.terminations);
        REQUIRE(a.unfired == b.unfired);
        REQUIRE(a.edges.size() == b.edges.size());
        for (size_t i = 0; i < a.edges.size(); ++i) {
            REQUIRE(a.edges[i].from == b.edges[i].from);
            REQUIRE(a.edges[i].to == b.edges[i].to);
            REQUIRE(a.edges[i].jt.label == b.edges[i].jt.label);
            REQUIRE(a.edges[i].jt.sender_transition == b.edges[i].jt.sender_transition);
            REQUIRE(a.edges[i].jt.receiver_transition == b.edges[i].jt.receiver_transition);
        }
    }
    Architecture atm = at::load_arch("atm.adl");
    ExploreOptions par;
    par.threads = 4;
    CHECK(explore(atm).states == explore(atm, par).states);
}

TEST_CASE("deadlock counterexample is shortest and replays") {
    Architecture arch = at::load_arch("atm.adl");
    at::drop(arch, "User", "logout", Direction::Send, "logged_in");
    StateGraph g = explore(arch);
    auto cex = check_deadlock(arch, g);
    REQUIRE(cex.has_value());
    CHECK(cex->kind == CexKind::DeadlockTrace);
    CHECK(cex->cycle.empty());
    CHECK(replay_counterexample(arch, *cex));
    // Shortest possible way to strand the terminal: login round (4 steps),
    // then chargePhone, noconnection, noconnectionUser.
    CHECK(cex->prefix.size() == 7);

    Architecture healthy = at::load_arch("atm.adl");
    CHECK_FALSE(check_deadlock(healthy, explore(healthy)).has_value());
}

TEST_CASE("an immediately stuck system yields an empty deadlock prefix") {
    std::string adl = "architecture Stuck {\n"
                      "  component A;\n  component B;\n"
                      "  channel c from A to B;\n"
                      "  statemachine A {\n    initial a0;\n    state a0;\n"
                      "    a0 -> a0 : send m on c;\n  }\n"
                      "  statemachine B {\n    initial b0;\n    state b0 final;\n  }\n"
                      "}\n";
    Architecture arch = parse_architecture(adl);
    StateGraph g = explore(arch);
    REQUIRE(g.deadlocks.size() == 1);
    auto cex = check_deadlock(arch, g);
    REQUIRE(cex.has_value());
    CHECK(cex->prefix.empty());
    CHECK(replay_counterexample(arch, *cex));
}

TEST_CASE("a system where every machine rests in a final state terminates") {
    std::string adl = "architecture Done {\n"
                      "  component A;\n  component B;\n"
                      "  channel c from A to B;\n"
                      "  statemachine A {\n    initial a0;\n    state a0;\n    state a1 final;\n"
                      "    a0 -> a1 : send m on c;\n  }\n"
                      "  statemachine B {\n    initial b0;\n    state b0;\n    state b1 final;\n"
                      "    b0 -> b1 : recv m on c;\n  }\n"
                      "}\n";
    Architecture arch = parse_architecture(adl);
    StateGraph g = explore(arch);
    CHECK(g.deadlocks.empty());
    REQUIRE(g.terminations.size() == 1);
    CHECK(g.states[static_cast<size_t>(g.terminations[0])] == GlobalState{1, 1});
    CHECK_FALSE(check_deadlock(arch, g).has_value());
}

TEST_CASE("product stutters terminal states on the end event") {
    // One exchange then both finish; required property left pending forever.
    std::string adl = "architecture Done {\n"
                      "  component A;\n  component B;\n"
                      "  channel c from A to B;\n"
                      "  statemachine A {\n    initial a0;\n    state a0;\n    state a1 final;\n"
                      "    a0 -> a1 : send m on c;\n  }\n"
                      "  statemachine B {\n    initial b0;\n    state b0;\n    state b1 final;\n"
                      "    b0 -> b1 : recv m on c;\n  }\n"
                      "}\n";
    Architecture arch = parse_architecture(adl);
    BoundProperty p = toy_prop(arch, "property P { e: m from A to B; r: m from A to B; }\n");
    PropertyResult r = check_property(arch, p);
    CHECK(r.verdict == Verdict::Violated);
    REQUIRE(r.cex.has_value());
    CHECK(r.cex->kind == CexKind::LivenessLasso);
    REQUIRE(!r.cex->cycle.empty());
    CHECK(r.cex->cycle.back().jt.is_end);
    CHECK(replay_counterexample(arch, *r.cex));
    std::string dump = dump_counterexample(arch, *r.cex);
    CHECK(dump.find("--- cycle ---") != std::string::npos);
    CHECK(dump.find("(end)") != std::string::npos);
}

TEST_CASE("toy properties: required discharge and forbidden continuation") {
    Architecture arch = at::load_arch("toy.adl");

    PropertyResult ok = check_property(arch, toy_prop(arch, "property A {\n"
                                                           "  e: m1 from C1 to C2;\n"
                                                           "  r: m2 from C2 to C1;\n"
                                                           "}\n"));
    CHECK(ok.verdict == Verdict::Valid);
    CHECK_FALSE(ok.cex.has_value());
    CHECK(ok.graph_states == 2);

    PropertyResult bad = check_property(arch, toy_prop(arch, "property B {\n"
                                                            "  e: m1 from C1 to C2;\n"
                                                            "  f: m2 from C2 to C1;\n"
                                                            "}\n"));
    CHECK(bad.verdict == Verdict::Violated);
    REQUIRE(bad.cex.has_value());
    CHECK(bad.cex->kind == CexKind::SafetyPrefix);
    REQUIRE(bad.cex->prefix.size() == 2);
    CHECK(bad.cex->prefix[0].jt.label == "m1");
    CHECK(bad.cex->prefix[1].jt.label == "m2");
    CHECK(replay_counterexample(arch, *bad.cex));

    // A message that is never exchanged cannot discharge an obligation.
    PropertyResult ghost = check_property(arch, toy_prop(arch, "property G {\n"
                                                              "  e: m1 from C1 to C2;\n"
                                                              "  r: ghost from C1 to C2;\n"
                                                              "}\n"));
    CHECK(ghost.verdict == Verdict::Violated);
    REQUIRE(ghost.cex.has_value());
    CHECK(ghost.cex->kind == CexKind::LivenessLasso);
    CHECK(replay_counterexample(arch, *ghost.cex));
}

TEST_CASE("cash machine fixture properties hold") {
    Architecture arch = at::load_arch("atm.adl");
    auto props = at::load_props("atm.psc");
    StateGraph g = explore(arch);
    for (const auto& p : props) {
        BoundProperty bp = bind(p, arch).property;
        PropertyResult r = check_property(arch, g, bp);
        CAPTURE(p.name);
        CHECK(r.verdict == Verdict::Valid);
        CHECK(r.product_states > 0);
        CHECK(r.product_diameter > 0);
    }
}

TEST_CASE("each hand-made model edit flips the documented verdicts") {
    Architecture base = at::load_arch("atm.adl");
    auto props = at::load_props("atm.psc");
    for (const auto& mut : at::atm_mutations()) {
        CAPTURE(mut.name);
        Architecture arch = base;
        mut.apply(arch);
        REQUIRE(validate(arch).empty());
        StateGraph g = explore(arch);
        CHECK(check_deadlock(arch, g).has_value() == mut.expect_deadlock);
        PropertyResult r1 = check_property(arch, g, at::bind_prop(arch, props, "P1"));
        PropertyResult r2 = check_property(arch, g, at::bind_prop(arch, props, "P2"));
        CHECK(r1.verdict == mut.expect_p1);
        CHECK(r2.verdict == mut.expect_p2);
        for (const PropertyResult* r : {&r1, &r2}) {
            if (r->cex) {
                CHECK(replay_counterexample(arch, *r->cex));
                CHECK((r->verdict == Verdict::Violated));
            }
        }
    }
}

TEST_CASE("nested search agrees with an SCC decomposition of the product") {
    Architecture base = at::load_arch("atm.adl");
    auto props = at::load_props("atm.psc");
    auto compare = [&](const Architecture& arch, const BoundProperty& bp) {
        StateGraph g = explore(arch);
        EventAlphabet alpha = EventAlphabet::from_architecture(arch);
        alpha.ensure_property(bp, arch);
        BuchiAutomaton ba = negate_to_buchi(bp, alpha);
        ProductGraph prod = build_product(g, ba, alpha);
        bool ndfs = find_accepting_cycle(g, prod).has_value();
        CHECK(ndfs == at::scc_has_accepting_cycle(prod));
        return ndfs;
    };
    compare(base, at::bind_prop(base, props, "P1"));
    compare(base, at::bind_prop(base, props, "P2"));
    for (const auto& mut : at::atm_mutations()) {
        Architecture arch = base;
        mut.apply(arch);
        CAPTURE(mut.name);
        compare(arch, at::bind_prop(arch, props, "P1"));
        compare(arch, at::bind_prop(arch, props, "P2"));
    }
}

TEST_CASE("liveness counterexamples close their loop") {
    Architecture arch = at::load_arch("atm.adl");
    at::retarget(arch, "TM", "funding_ok", Direction::Receive, "w_wait", "w_fail");
    auto props = at::load_props("atm.psc");
    PropertyResult r = check_property(arch, at::bind_prop(arch, props, "P1"));
    REQUIRE(r.verdict == Verdict::Violated);
    REQUIRE(r.cex.has_value());
    REQUIRE(r.cex->kind == CexKind::LivenessLasso);
    REQUIRE_FALSE(r.cex->cycle.empty());
    CHECK(replay_counterexample(arch, *r.cex));
    // The loop returns to the state it entered from.
    const GlobalState& loop_entry = r.cex->prefix.empty()
                                        ? initial_state(arch)
                                        : r.cex->prefix.back().after;
    CHECK(r.cex->cycle.back().after == loop_entry);
}

TEST_CASE("replay rejects tampered counterexamples") {
    Architecture arch = at::load_arch("toy.adl");
    PropertyResult bad = check_property(arch, toy_prop(arch, "property B {\n"
                                                            "  e: m1 from C1 to C2;\n"
                                                            "  f: m2 from C2 to C1;\n"
                                                            "}\n"));
    REQUIRE(bad.cex.has_value());
    Counterexample broken = *bad.cex;
    broken.prefix[1].jt.label = "m9";
    std::string why;
    CHECK_FALSE(replay_counterexample(arch, broken, &why));
    CHECK(!why.empty());

    Counterexample wrong_state = *bad.cex;
    wrong_state.prefix[1].after[0] = 9;
    CHECK_FALSE(replay_counterexample(arch, wrong_state, &why));
}

TEST_CASE("simulation is reproducible per seed and stops at sinks") {
    Architecture arch = at::load_arch("atm.adl");
    Trace a = simulate(arch, 7, 50);
    Trace b = simulate(arch, 7, 50);
    REQUIRE(a.steps.size() == b.steps.size());
    CHECK(a.steps.size() == 50);
    CHECK_FALSE(a.hit_sink);
    CHECK(dump_trace(arch, a.steps) == dump_trace(arch, b.steps));

    Trace c = simulate(arch, 8, 50);
    CHECK(dump_trace(arch, a.steps) != dump_trace(arch, c.steps));

    std::string stuck_adl = "architecture Stuck {\n"
                            "  component A;\n  component B;\n"
                            "  channel c from A to B;\n"
                            "  statemachine A {\n    initial a0;\n    state a0;\n"
                            "    a0 -> a0 : send m on c;\n  }\n"
                            "  statemachine B {\n    initial b0;\n    state b0 final;\n  }\n"
                            "}\n";
    Architecture stuck = parse_architecture(stuck_adl);
    Trace t = simulate(stuck, 1, 10);
    CHECK(t.steps.empty());
    CHECK(t.hit_sink);
}

TEST_CASE("every simulated step is a live transition of the model") {
    Architecture arch = at::load_arch("atm.adl");
    for (uint64_t seed : {1ULL, 2ULL, 3ULL}) {
        Trace t = simulate(arch, seed, 40);
        GlobalState cur = initial_state(arch);
        for (const Step& s : t.steps) {
            std::vector<Step> options = successors(arch, cur);
            bool found = false;
            for (const Step& o : options)
                found = found || (o.jt.label == s.jt.label && o.after == s.after &&
                                  o.jt.sender_transition == s.jt.sender_transition);
            CHECK(found);
            cur = s.after;
        }
    }
}

TEST_CASE("trace dump carries step numbers, channels, and locals") {
    Architecture arch = at::load_arch("toy.adl");
    Trace t = simulate(arch, 0, 2);
    std::string text = dump_trace(arch, t.steps);
    CHECK(text.find("#1 m1 on C1_TO_C2 C1->C2") != std::string::npos);
    CHECK(text.find("#2 m2 on C2_TO_C1 C2->C1") != std::string::npos);
}

TEST_CASE("declarative verdicts match the automaton pipeline on the fixtures") {
    Architecture arch = at::load_arch("atm.adl");
    auto props = at::load_props("atm.psc");
    for (const char* name : {"P1", "P2"}) {
        BoundProperty bp = at::bind_prop(arch, props, name);
        PropertyResult r = check_property(arch, bp);
        BruteForceOptions opts;
        opts.depth_bound = r.product_diameter;
        CAPTURE(name);
        CHECK((brute_force_verdict(arch, bp, opts) == BruteVerdict::Violated) ==
              (r.verdict == Verdict::Violated));
    }
}

TEST_CASE("brute force respects its node budget") {
    Architecture arch = at::load_arch("atm.adl");
    auto props = at::load_props("atm.psc");
    BoundProperty bp = at::bind_prop(arch, props, "P1");
    BruteForceOptions opts;
    opts.depth_bound = 40;
    opts.node_budget = 100;
    CHECK_THROWS_WITH_AS(brute_force_verdict(arch, bp, opts), "bound exceeded", CapExceeded);
}

TEST_CASE("deep brute-force runs confirm the fixtures") {
    Architecture arch = at::load_arch("atm.adl");
    auto props = at::load_props("atm.psc");
    for (const char* name : {"P1", "P2"}) {
        BruteForceOptions opts;
        opts.depth_bound = 40;
        CAPTURE(name);
        CHECK(brute_force_verdict(arch, at::bind_prop(arch, props, name), opts) ==
              BruteVerdict::Valid);
    }
}
