#pragma once

#include <string>
#include <vector>

#include "archon/model.hpp"
#include "archon/psc.hpp"

namespace archon {

// Declarative tracking of one property along one run: precondition progress
// plus one obligation thread per completed match. Shares nothing with the
// automaton pipeline so the two can check each other.
class DeclarativeConfig {
public:
    explicit DeclarativeConfig(const BoundProperty& prop);

    void reset();
    // Feed one exchanged message.
    void step(const MsgRef& e);
    // Period boundary during cycle evaluation: ages every live thread.
    void boundary();

    bool violated() const { return violated_; }
    // Live obligation threads; any at the end of a finite run is a violation.
    bool pending() const { return !threads_.empty(); }
    // A thread alive for m+1 complete periods repeats a period with no
    // progress, so it can never discharge.
    bool stalled() const;
    std::string key() const;

private:
    struct Thread {
        int progress = 0;
        int age = 0;
    };

    void spawn();
    void merge_threads();

    const BoundProperty* prop_;
    int q_ = 0;
    bool violated_ = false;
    std::vector<Thread> threads_;  // distinct progress values, ascending
};

enum class BruteVerdict { Valid, Violated };

struct BruteForceOptions {
    int depth_bound = 32;
    // Walk positions examined before giving up.
    long node_budget = 4000000;
    int state_cap = 1000000;
};

// Exhaustive enumeration of bounded walks through the global-state graph,
// judging each finite maximal walk and each lasso closure declaratively.
// Throws CapExceeded("bound exceeded") when the budget runs out first.
BruteVerdict brute_force_verdict(const Architecture& arch, const BoundProperty& prop,
                                 const BruteForceOptions& opts = {});

// Judges one complete run; an empty cycle means a finite maximal run.
bool run_violates(const BoundProperty& prop, const std::vector<MsgRef>& prefix,
                  const std::vector<MsgRef>& cycle);

}  // namespace archon
