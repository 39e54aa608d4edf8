#include <benchmark/benchmark.h>

#include <random>

#include "vpbias/bias.hpp"
#include "vpbias/engine.hpp"
#include "vpbias/extension.hpp"
#include "vpbias/sampling.hpp"
#include "vpbias/synth.hpp"

using namespace vpbias;

namespace {

const synth::SynthOutput& fixture() {
  static const synth::SynthOutput out = [] {
    synth::SynthSpec s;
    s.n_ases = 20000;
    s.seed = 1;
    s.dimensions = {
        {"continent", synth::UniformCategorical{6}, CategoryGroup::Location, {}, 0.0, false},
        {"country", synth::ZipfCategorical{80, 1.1}, CategoryGroup::Location, {}, 0.0, false},
        {"network_type", synth::ZipfCategorical{5, 1.0}, CategoryGroup::NetworkType, {}, 0.0, false},
        {"customer_cone_asns", synth::Pareto{1.2}, CategoryGroup::NetworkSize, {}, 0.0, true},
        {"as_hegemony", synth::LogNormal{-6, 1.5}, CategoryGroup::NetworkSize, {}, 0.0, false},
        {"neighbors_total", synth::Pareto{1.5}, CategoryGroup::Topology, {}, 0.05, true},
    };
    s.vp_strategies = {{"v", synth::CategorySkew{"network_type", "c4", 0.8, 1000}}};
    return synth::generate(s);
  }();
  return out;
}

void BM_BiasVector(benchmark::State& state) {
  const auto& f = fixture();
  const auto pop = f.table.asn_set();
  for (auto _ : state) benchmark::DoNotOptimize(bias_vector(f.table, pop, f.vantage_point_sets[0].members));
}
BENCHMARK(BM_BiasVector)->Unit(benchmark::kMillisecond);

void BM_EngineBias(benchmark::State& state) {
  const auto& f = fixture();
  BiasEngine e(f.table, f.table.asn_set(), {});
  const auto counts = e.counts_of(f.vantage_point_sets[0].members);
  for (auto _ : state) benchmark::DoNotOptimize(e.bias(counts));
}
BENCHMARK(BM_EngineBias);

void BM_GreedySubsample(benchmark::State& state) {
  const auto& f = fixture();
  BiasEngine e(f.table, f.table.asn_set(), {});
  const auto& v = f.vantage_point_sets[0].members;
  const auto k = v.size() - static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(greedy_subsample(e, v, k));
}
BENCHMARK(BM_GreedySubsample)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_ScoreCandidates(benchmark::State& state) {
  const auto& f = fixture();
  const auto pop = f.table.asn_set();
  BiasEngine e(f.table, pop, {});
  const auto& v = f.vantage_point_sets[0].members;
  AsnSet cands;
  for (Asn a : pop)
    if (!v.contains(a)) cands.insert(a);
  for (auto _ : state) benchmark::DoNotOptimize(score_candidates(e, v, cands));
}
BENCHMARK(BM_ScoreCandidates)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
