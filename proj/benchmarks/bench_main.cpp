#include <benchmark/benchmark.h>

#include <random>

#include "sam/aura.hpp"
#include "sam/oracle.hpp"
#include "sam/runner.hpp"

namespace {

// Steady-state decision cost: warm the policy up, then time decide() alone.
void BM_AuraDecision(benchmark::State& state) {
  const auto k = state.range(0);
  const auto sc = sam::make_scenario("scale_" + std::to_string(k));
  auto policy = sam::make_policy({"aura", {}, ""}, sc);
  auto plan = policy->initial_plan();
  std::int64_t t = 0;
  const auto total = sc.env.schedule.total_cycles();
  for (; t < total / 2; ++t) plan = policy->decide(*sam::step(sc.env, plan, t), plan, t);
  const auto obs = *sam::step(sc.env, plan, t);
  for (auto _ : state) {
    auto next = policy->decide(obs, plan, t);
    benchmark::DoNotOptimize(next);
  }
  state.counters["touched"] = static_cast<double>(policy->last_stats().touched);
}
BENCHMARK(BM_AuraDecision)->Arg(20)->Arg(60)->Arg(120)->Arg(480);

void BM_CoreDecision(benchmark::State& state) {
  const auto sc = sam::make_scenario("scale_" + std::to_string(state.range(0)));
  auto policy = sam::make_policy({"sam_core", {}, ""}, sc);
  auto plan = policy->initial_plan();
  std::int64_t t = 0;
  for (; t < 100; ++t) plan = policy->decide(*sam::step(sc.env, plan, t), plan, t);
  const auto obs = *sam::step(sc.env, plan, t);
  for (auto _ : state) benchmark::DoNotOptimize(policy->decide(obs, plan, t));
}
BENCHMARK(BM_CoreDecision)->Arg(20)->Arg(120);

void BM_HeapFilter(benchmark::State& state) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<sam::ScoredTenant> xs(static_cast<std::size_t>(state.range(0)));
  for (std::size_t i = 0; i < xs.size(); ++i) xs[i] = {static_cast<sam::TenantId>(i), u(rng)};
  for (auto _ : state) benchmark::DoNotOptimize(sam::two_way_heap_filter(xs, 8));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_HeapFilter)->RangeMultiplier(4)->Range(64, 16384)->Complexity(benchmark::oN);

void BM_Mckp(benchmark::State& state) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  sam::MckpInstance inst;
  inst.budget = state.range(1);
  for (std::int64_t g = 0; g < state.range(0); ++g) {
    std::vector<sam::MckpItem> items;
    double v = 0.0;
    for (std::int64_t w = 0; w <= inst.budget; ++w) items.push_back({w, v += u(rng) / (1.0 + w)});
    inst.groups.push_back(std::move(items));
  }
  for (auto _ : state) benchmark::DoNotOptimize(sam::solve_mckp(inst));
}
BENCHMARK(BM_Mckp)->Args({10, 64})->Args({20, 128})->Args({60, 64});

void BM_OracleForPhase(benchmark::State& state) {
  const auto sc = sam::make_scenario("hotspot_shift");
  for (auto _ : state) benchmark::DoNotOptimize(sam::oracle_for_phase(sc.env, sc.pool, 1, state.range(0)));
}
BENCHMARK(BM_OracleForPhase)->Arg(64)->Arg(16);

}  // namespace
BENCHMARK_MAIN();
