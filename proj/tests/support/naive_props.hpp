#pragma once

// Word-level property evaluation, written as plainly as possible so it can
// arbitrate between the automaton pipeline and the declarative tracker. No
// automata, no thread configurations: positions of an unrolled prefix.cycle^w
// word are scanned with explicit loops, one obligation at a time.

#include <cstddef>
#include <vector>

#include "archon/psc.hpp"

namespace archon::testing {

// An empty cycle means a finite maximal run.
inline bool naive_violates(const BoundProperty& prop, const std::vector<MsgRef>& prefix,
                           const std::vector<MsgRef>& cycle) {
    const auto& pre = prop.precondition;
    const auto& cont = prop.continuation;
    const size_t k = pre.size();
    const size_t m = cont.size();
    const size_t plen = prefix.size();
    const size_t clen = cycle.size();
    const bool finite = clen == 0;

    auto at = [&](size_t t) -> const MsgRef& {
        return t < plen ? prefix[t] : cycle[(t - plen) % clen];
    };
    auto in_set = [](const std::vector<MsgRef>& set, const MsgRef& e) {
        for (const auto& u : set)
            if (u == e) return true;
        return false;
    };

    // The armed tracker has k+1 states, so its state at period boundaries
    // repeats within k+2 boundaries; positions past that horizon replay
    // earlier ones and add nothing new.
    const size_t horizon = finite ? plen : plen + (k + 4) * clen;

    // Pass 1: run the tracker. For the fail kind a hit while armed settles
    // the verdict; for the required kind record every match position.
    std::vector<char> match_at(horizon, 0);
    const bool match_at_start = !prop.fail_kind && k == 0;
    size_t q = 0;
    for (size_t t = 0; t < horizon; ++t) {
        const MsgRef& e = at(t);
        if (q < k) {
            if (e == pre[q].msg) {
                ++q;
                if (q == k && !prop.fail_kind) match_at[t] = 1;
            } else if (in_set(pre[q].unwanted, e)) {
                q = e == pre[0].msg ? 1 : 0;
            }
        } else if (prop.fail_kind) {
            if (k > 0 && e == pre[0].msg)
                q = 1;
            else if (e == cont[0].msg)
                return true;
            else if (in_set(cont[0].unwanted, e))
                q = 0;
        } else {
            if (k > 0 && e == pre[0].msg) {
                q = 1;
                if (k == 1) match_at[t] = 1;  // a one-message precondition re-matches while armed
            } else if (k > 0 && in_set(pre[0].unwanted, e)) {
                q = 0;
            }
        }
    }
    if (prop.fail_kind) return false;  // no hit within the horizon means no hit at all

    // Pass 2: each match carries its own obligation chain, consumed from the
    // next position on. Progress never resets: the chain either discharges,
    // hits an unwanted message, or survives so many whole periods that one of
    // them saw no progress and therefore repeats forever.
    const size_t limit = finite ? plen : plen + (k + 4 + m + 3) * clen;
    auto obligation_violates = [&](size_t start) {
        size_t j = 0;
        for (size_t t = start; t < limit; ++t) {
            const MsgRef& e = at(t);
            if (e == cont[j].msg) {
                if (++j == m) return false;  // discharged
            } else if (in_set(cont[j].unwanted, e)) {
                return true;  // trapped
            }
        }
        return true;  // finite: still pending at the end; infinite: stalled
    };

    if (match_at_start && obligation_violates(0)) return true;
    for (size_t t = 0; t < horizon; ++t)
        if (match_at[t] && obligation_violates(t + 1)) return true;
    return false;
}

}  // namespace archon::testing
