#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "archon/checker.hpp"
#include "archon/model.hpp"

namespace {

// n independent ping/pong component pairs; the reachable space is 2^n, so
// the frontier grows wide enough to give the parallel expansion real work.
archon::Architecture pairs_model(int n) {
    using namespace archon;
    Architecture arch;
    arch.name = "pairs";
    for (int i = 0; i < n; ++i) {
        std::string suffix = std::to_string(i);
        arch.components.push_back({"A" + suffix, {}});
        arch.components.push_back({"B" + suffix, {}});
    }
    for (int i = 0; i < n; ++i) {
        std::string suffix = std::to_string(i);
        arch.channels.push_back({"ping" + suffix, 2 * i, 2 * i + 1, {}});
        arch.channels.push_back({"pong" + suffix, 2 * i + 1, 2 * i, {}});
    }
    for (int i = 0; i < n; ++i) {
        StateMachine a;
        a.owner = 2 * i;
        a.initial = 0;
        a.states = {{"a0", true, {}}, {"a1", false, {}}};
        a.transitions = {{0, 1, "ping", archon::Direction::Send, 2 * i, {}},
                         {1, 0, "pong", archon::Direction::Receive, 2 * i + 1, {}}};
        arch.machines.push_back(a);

        StateMachine b;
        b.owner = 2 * i + 1;
        b.initial = 0;
        b.states = {{"b0", true, {}}, {"b1", false, {}}};
        b.transitions = {{0, 1, "ping", archon::Direction::Receive, 2 * i, {}},
                         {1, 0, "pong", archon::Direction::Send, 2 * i + 1, {}}};
        arch.machines.push_back(b);
    }
    return arch;
}

void run_explore(benchmark::State& state, int threads) {
    archon::Architecture arch = pairs_model(static_cast<int>(state.range(0)));
    archon::ExploreOptions opts;
    opts.state_cap = 4000000;
    opts.threads = threads;
    size_t states = 0;
    for (auto _ : state) {
        archon::StateGraph graph = archon::explore(arch, opts);
        states = graph.states.size();
        benchmark::DoNotOptimize(states);
    }
    state.counters["states"] = static_cast<double>(states);
}

void BM_explore_serial(benchmark::State& state) { run_explore(state, 1); }

void BM_explore_parallel(benchmark::State& state) {
#ifdef _OPENMP
    run_explore(state, omp_get_max_threads());
#else
    run_explore(state, 1);
#endif
}

BENCHMARK(BM_explore_serial)->Arg(10)->Arg(14)->Arg(17)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_explore_parallel)->Arg(10)->Arg(14)->Arg(17)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
