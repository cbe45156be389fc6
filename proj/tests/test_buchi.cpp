#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "archon/buchi.hpp"
#include "archon/declarative.hpp"
#include "support/naive_props.hpp"
#include "support/testing.hpp"

using namespace archon;
namespace at = archon::testing;

namespace {

// Three-letter test alphabet; each letter travels on its own channel.
EventAlphabet abc() {
    return EventAlphabet::from_events({{"a", "ca"}, {"b", "cb"}, {"c", "cc"}});
}

const MsgRef A{"a", 0};
const MsgRef B{"b", 1};
const MsgRef C{"c", 2};

BoundMessage msg(PscKind kind, const MsgRef& m, std::vector<MsgRef> unwanted = {}) {
    return {kind, m, std::move(unwanted)};
}

BoundProperty prop(bool fail, std::vector<BoundMessage> pre, std::vector<BoundMessage> cont) {
    BoundProperty p;
    p.name = "t";
    p.fail_kind = fail;
    p.precondition = std::move(pre);
    p.continuation = std::move(cont);
    return p;
}

}  // namespace

TEST_CASE("alphabet construction follows channel then send declaration order") {
    Architecture arch = at::load_arch("toy.adl");
    EventAlphabet a = EventAlphabet::from_architecture(arch);
    REQUIRE(a.size() == 3);
    CHECK(a.event(0).label == "m1");
    CHECK(a.event(1).label == "m2");
    CHECK(a.event(2).label == "end");
    CHECK(a.end_event() == 2);
    CHECK(a.find("m2", 1) == 1);
    CHECK(a.find("m2", 0) == -1);
    CHECK(a.event_text(0) == "m1@C1_TO_C2");
    CHECK(a.event_text(2) == "end");
}

TEST_CASE("alphabet keeps end last when property events are added") {
    Architecture arch = at::load_arch("toy.adl");
    EventAlphabet a = EventAlphabet::from_architecture(arch);
    BoundProperty p = prop(false, {msg(PscKind::Regular, {"ghost", 0})},
                           {msg(PscKind::Required, {"m2", 1}, {{"phantom", 1}})});
    a.ensure_property(p, arch);
    REQUIRE(a.size() == 5);
    CHECK(a.event(2).label == "ghost");
    CHECK(a.event(3).label == "phantom");
    CHECK(a.event(4).label == "end");
    CHECK(a.end_event() == 4);
    // Idempotent.
    a.ensure_property(p, arch);
    CHECK(a.size() == 5);
}

TEST_CASE("unmatched sends never enter the architecture alphabet") {
    // The cash machine's withdraw_ko/noconnection pairs are matched, so they
    // appear; a label only sent but never received must not.
    Architecture arch = at::load_arch("atm.adl");
    EventAlphabet a = EventAlphabet::from_architecture(arch);
    CHECK(a.find("withdraw_ko", arch.channel_index("TM_TO_User")) >= 0);
    int before = a.size();
    StateMachine& tm = arch.machines[1];
    tm.transitions.push_back({0, 0, "orphan", Direction::Send, arch.channel_index("TM_TO_BA"), {}});
    EventAlphabet b = EventAlphabet::from_architecture(arch);
    CHECK(b.size() == before);
    CHECK(b.find("orphan", arch.channel_index("TM_TO_BA")) == -1);
}

TEST_CASE("monitor tables match hand-computed rows") {
    EventAlphabet alpha = abc();

    SUBCASE("two-step precondition with a forbidden fail message") {
        // expect a, then b with c unwanted in between; then c must not occur,
        // with b resetting the armed tracker.
        BoundProperty p = prop(true, {msg(PscKind::Regular, A), msg(PscKind::Regular, B, {C})},
                               {msg(PscKind::Fail, C, {B})});
        Monitor m = build_monitor(p, alpha);
        CHECK(m.k == 2);
        CHECK(m.fail_kind);
        CHECK(m.n_states == 4);
        CHECK(m.violation_state == 3);
        CHECK(m.match_state() == 2);
        // Rows over events a, b, c, end.
        CHECK(m.table[0] == std::vector<int>{1, 0, 0, 0});
        CHECK(m.table[1] == std::vector<int>{1, 2, 0, 1});
        CHECK(m.table[2] == std::vector<int>{1, 0, 3, 2});
        CHECK(m.table[3] == std::vector<int>{3, 3, 3, 3});
    }
    SUBCASE("unwanted event that equals the first message restarts the match") {
        // expect a then b, with a unwanted before b: a mid-match restarts
        // instead of resetting to zero.
        BoundProperty p = prop(false, {msg(PscKind::Regular, A), msg(PscKind::Regular, B, {A})},
                               {msg(PscKind::Required, C)});
        Monitor m = build_monitor(p, alpha);
        CHECK(m.table[1] == std::vector<int>{1, 2, 1, 1});
        CHECK(m.step(1, 0) == 1);  // restart lands on one message matched, not zero
    }
    SUBCASE("empty precondition arms the monitor immediately") {
        BoundProperty p = prop(true, {}, {msg(PscKind::Fail, C)});
        Monitor m = build_monitor(p, alpha);
        CHECK(m.k == 0);
        CHECK(m.n_states == 2);
        CHECK(m.table[0] == std::vector<int>{0, 0, 1, 0});
    }
    SUBCASE("events outside the alphabet are an error") {
        BoundProperty p = prop(true, {}, {msg(PscKind::Fail, {"zz", 7})});
        CHECK_THROWS_WITH_AS(build_monitor(p, alpha),
                             doctest::Contains("'zz' is not in the alphabet"), Error);
    }
}

TEST_CASE("negation automaton shape for a required property") {
    EventAlphabet alpha = abc();
    BoundProperty p = prop(false, {msg(PscKind::Regular, A)}, {msg(PscKind::Required, B, {C})});
    BuchiAutomaton ba = negate_to_buchi(p, alpha);
    REQUIRE(ba.n_states == 4);
    CHECK(ba.initial == 0);
    CHECK(ba.state_names == std::vector<std::string>{"q0", "q1", "o1", "trap"});
    CHECK(ba.accepting == std::vector<bool>{false, false, true, true});
    CHECK(ba.trap_state == 3);
    CHECK(dump_automaton(ba, alpha) == "q0 -> q1 : {a@ca}\n"
                                       "q0 -> q0 : {b@cb,c@cc,end}\n"
                                       "q0 -> o1 : {a@ca}\n"
                                       "q1 -> q1 : {a@ca,b@cb,c@cc,end}\n"
                                       "q1 -> o1 : {a@ca}\n"
                                       "o1 -> o1 : {a@ca,end} accepting\n"
                                       "o1 -> trap : {c@cc} accepting\n"
                                       "trap -> trap : {a@ca,b@cb,c@cc,end} accepting\n");
}

TEST_CASE("negation automaton for a fail property is the monitor with a trap") {
    EventAlphabet alpha = abc();
    BoundProperty p = prop(true, {msg(PscKind::Regular, A)}, {msg(PscKind::Fail, C)});
    BuchiAutomaton ba = negate_to_buchi(p, alpha);
    REQUIRE(ba.n_states == 3);
    CHECK(ba.state_names == std::vector<std::string>{"q0", "q1", "trap"});
    CHECK(ba.accepting == std::vector<bool>{false, false, true});
    CHECK(ba.trap_state == 2);
    // Only runs that reach the trap are accepted.
    CHECK(accepts_lasso(ba, {0, 2}, {0}));
    CHECK_FALSE(accepts_lasso(ba, {0}, {1}));
    CHECK_FALSE(accepts_finite_run(ba, {0, 1, 0, 1}, alpha));
    CHECK(accepts_finite_run(ba, {1, 0, 1, 2}, alpha));
}

TEST_CASE("empty-precondition required property starts on the obligation") {
    EventAlphabet alpha = abc();
    BoundProperty p = prop(false, {}, {msg(PscKind::Required, B)});
    BuchiAutomaton ba = negate_to_buchi(p, alpha);
    REQUIRE(ba.n_states == 2);
    CHECK(ba.state_names == std::vector<std::string>{"o1", "trap"});
    CHECK(ba.initial == 0);
    CHECK(ba.accepting[0]);
    // b never occurring is the violation; the empty run violates too.
    CHECK(accepts_lasso(ba, {}, {0}));
    CHECK_FALSE(accepts_lasso(ba, {}, {1}));
    CHECK(accepts_finite_run(ba, {}, alpha));
    CHECK_FALSE(accepts_finite_run(ba, {0, 1}, alpha));
}

TEST_CASE("accepts_lasso rejects an empty cycle") {
    EventAlphabet alpha = abc();
    BoundProperty p = prop(true, {}, {msg(PscKind::Fail, C)});
    BuchiAutomaton ba = negate_to_buchi(p, alpha);
    CHECK_THROWS_AS(accepts_lasso(ba, {0}, {}), Error);
}

namespace {

// Catalog stressing every rule: both kinds, empty/short/long preconditions,
// unwanted sets on every slot, self-referential corner cases.
std::vector<BoundProperty> catalog() {
    return {
        prop(true, {}, {msg(PscKind::Fail, C)}),
        prop(true, {}, {msg(PscKind::Fail, C, {B})}),
        prop(true, {msg(PscKind::Regular, A)}, {msg(PscKind::Fail, C)}),
        prop(true, {msg(PscKind::Regular, A)}, {msg(PscKind::Fail, C, {B})}),
        prop(true, {msg(PscKind::Regular, A), msg(PscKind::Regular, B, {C})},
             {msg(PscKind::Fail, C, {B})}),
        prop(true, {msg(PscKind::Regular, A)}, {msg(PscKind::Fail, A)}),
        prop(false, {}, {msg(PscKind::Required, B)}),
        prop(false, {}, {msg(PscKind::Required, B, {A})}),
        prop(false, {msg(PscKind::Regular, A)}, {msg(PscKind::Required, B)}),
        prop(false, {msg(PscKind::Regular, A)}, {msg(PscKind::Required, B, {C})}),
        prop(false, {msg(PscKind::Regular, A)}, {msg(PscKind::Required, A)}),
        prop(false, {msg(PscKind::Regular, A)},
             {msg(PscKind::Required, B), msg(PscKind::Required, C, {A})}),
        prop(false, {msg(PscKind::Regular, A), msg(PscKind::Regular, B, {A})},
             {msg(PscKind::Required, C)}),
        prop(false, {msg(PscKind::Regular, A, {B}), msg(PscKind::Regular, B, {C})},
             {msg(PscKind::Required, C, {B})}),
    };
}

}  // namespace

TEST_CASE("the automaton, the declarative tracker, and the word scan agree on every short run") {
    EventAlphabet alpha = abc();
    const std::vector<MsgRef> refs{A, B, C};
    auto cat = catalog();
    std::vector<BuchiAutomaton> bas;
    for (const auto& p : cat) bas.push_back(negate_to_buchi(p, alpha));

    const int max_len = 7;
    long lassos = 0;
    long finite = 0;

    std::vector<int> word;
    for (int len = 0; len <= max_len; ++len) {
        word.assign(static_cast<size_t>(len), 0);
        for (;;) {
            std::vector<MsgRef> word_refs;
            for (int e : word) word_refs.push_back(refs[static_cast<size_t>(e)]);

            for (size_t pi = 0; pi < cat.size(); ++pi) {
                // Finite maximal run.
                bool ba_says = accepts_finite_run(bas[pi], word, alpha);
                bool decl_says = run_violates(cat[pi], word_refs, {});
                bool scan_says = at::naive_violates(cat[pi], word_refs, {});
                ++finite;
                if (ba_says != decl_says || ba_says != scan_says) {
                    CAPTURE(pi);
                    CAPTURE(word);
                    REQUIRE(ba_says == decl_says);
                    REQUIRE(ba_says == scan_says);
                }
                // Every split into prefix and non-empty cycle.
                for (int split = 0; split < len; ++split) {
                    std::vector<int> pre_ids(word.begin(), word.begin() + split);
                    std::vector<int> cyc_ids(word.begin() + split, word.end());
                    std::vector<MsgRef> pre_refs(word_refs.begin(), word_refs.begin() + split);
                    std::vector<MsgRef> cyc_refs(word_refs.begin() + split, word_refs.end());
                    bool ba_l = accepts_lasso(bas[pi], pre_ids, cyc_ids);
                    bool decl_l = run_violates(cat[pi], pre_refs, cyc_refs);
                    bool scan_l = at::naive_violates(cat[pi], pre_refs, cyc_refs);
                    ++lassos;
                    if (ba_l != decl_l || ba_l != scan_l) {
                        CAPTURE(pi);
                        CAPTURE(word);
                        CAPTURE(split);
                        REQUIRE(ba_l == decl_l);
                        REQUIRE(ba_l == scan_l);
                    }
                }
            }

            // Next word in base-3 counting order.
            int i = len - 1;
            while (i >= 0 && word[static_cast<size_t>(i)] == 2) {
                word[static_cast<size_t>(i)] = 0;
                --i;
            }
            if (i < 0) break;
            ++word[static_cast<size_t>(i)];
        }
    }
    CHECK(finite == 14 * (1 + 3 + 9 + 27 + 81 + 243 + 729 + 2187));
    CHECK(lassos > 0);
    MESSAGE("lassos checked: ", lassos);
}

TEST_CASE("spot checks with known verdicts") {
    // After a, c must not occur: a single c inside the loop body violates.
    EventAlphabet alpha = abc();
    BoundProperty after_a_no_c = prop(true, {msg(PscKind::Regular, A)}, {msg(PscKind::Fail, C)});
    BuchiAutomaton ba = negate_to_buchi(after_a_no_c, alpha);
    CHECK(accepts_lasso(ba, {0}, {1, 2}));
    CHECK_FALSE(accepts_lasso(ba, {1, 2}, {1}));

    // Every a is followed by b: the loop a,c,b discharges each a; a,c does not.
    BoundProperty a_then_b = prop(false, {msg(PscKind::Regular, A)}, {msg(PscKind::Required, B)});
    BuchiAutomaton ba2 = negate_to_buchi(a_then_b, alpha);
    CHECK_FALSE(accepts_lasso(ba2, {}, {0, 2, 1}));
    CHECK(accepts_lasso(ba2, {}, {0, 2}));
    CHECK(accepts_finite_run(ba2, {0, 1, 0}, alpha));
    CHECK_FALSE(accepts_finite_run(ba2, {0, 1}, alpha));
}
