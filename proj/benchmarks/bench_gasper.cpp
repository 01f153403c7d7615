#include "gasper/fork_choice.hpp"
#include "gasper/monitors.hpp"
#include "gasper/presets.hpp"
#include "gasper/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace gasper;

namespace {

// wide random tree: 64 validators, a block per slot on a random earlier block
void BM_ghost(benchmark::State& state) {
   const auto nblocks = state.range(0);
   timing tm;
   tm.slots_per_epoch = 32;
   balance_schedule bal(balances(64, 32), {});
   block_store store(tm, &bal, rational(0));
   std::mt19937_64 rng(1);
   std::vector<block_t> blocks{store.genesis()};
   for (slot_t s = 1; s <= nblocks; ++s) {
      block_t p = blocks[blocks.size() - 1 - uniform_below(rng, std::min<std::uint64_t>(blocks.size(), 4))];
      blocks.push_back(store.add_block(p, s, 0));
   }
   std::vector<ghost_vote> votes;
   for (validator_t v = 0; v < 64; ++v) {
      block_t b = blocks[uniform_below(rng, blocks.size())];
      votes.push_back({v, store.get(b).slot, b});
   }
   const balances w(64, 32);
   for (auto _ : state)
      benchmark::DoNotOptimize(fork_choice::ghost(store, blocks, votes, w, nblocks + 1));
}
BENCHMARK(BM_ghost)->Arg(32)->Arg(128)->Arg(512);

void BM_fast_path(benchmark::State& state) {
   const auto cfg = preset("fast-path");
   for (auto _ : state) benchmark::DoNotOptimize(run_scenario(cfg).events.size());
}
BENCHMARK(BM_fast_path)->Unit(benchmark::kMillisecond);

void BM_sweep_run(benchmark::State& state) {
   const auto kind = sweep_strategies[state.range(0)];
   std::uint64_t seed = 0;
   for (auto _ : state) benchmark::DoNotOptimize(run_scenario(sweep_scenario(kind, seed++)).events.size());
   state.SetLabel(to_string(kind));
}
BENCHMARK(BM_sweep_run)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_analyze(benchmark::State& state) {
   const auto tr = run_scenario(sweep_scenario(strategy::equivocate, 1));
   for (auto _ : state) benchmark::DoNotOptimize(monitor::analyze(tr).rules.size());
}
BENCHMARK(BM_analyze)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
