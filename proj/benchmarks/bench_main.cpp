#include <benchmark/benchmark.h>

#include "literalis/corpus.hpp"
#include "literalis/signals.hpp"
#include "literalis/sli.hpp"
#include "literalis/stats.hpp"
#include "synthetic.hpp"

using namespace literalis;

namespace {

std::vector<FeatureRecord> corpus(std::size_t n) {
  synth::Gen g(17);
  std::vector<FeatureRecord> out;
  for (std::size_t i = 0; i < n; ++i) out.push_back(synth::random_record(g, "r" + std::to_string(i)));
  return out;
}

void BM_parse_record(benchmark::State& state) {
  std::vector<std::string> lines;
  for (const auto& r : corpus(1000)) lines.push_back(serialize_record(r));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(parse_record(lines[i++ % lines.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_parse_record);

void BM_score_record(benchmark::State& state) {
  const auto recs = corpus(1000);
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(score_record(recs[i++ % recs.size()]));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_score_record);

void BM_compute_sli(benchmark::State& state) {
  const auto recs = corpus(1000);
  std::vector<SignalVector> sig;
  Normalizer norm;
  for (const auto& r : recs) {
    sig.push_back(score_record(r));
    norm.observe(normalizer_key(NormalizerScope::lp, r.lp, r.task), sig.back());
  }
  const auto cfg = SliConfig::defaults();
  std::size_t i = 0;
  for (auto _ : state) {
    const auto k = i++ % recs.size();
    benchmark::DoNotOptimize(sli(sig[k], norm, cfg, normalizer_key(NormalizerScope::lp, recs[k].lp, recs[k].task)));
  }
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_compute_sli);

void BM_paired_bootstrap(benchmark::State& state) {
  synth::Gen g(3);
  stats::ScoreMap a, b;
  for (int i = 0; i < state.range(0); ++i) {
    a["s" + std::to_string(i)] = g.unit();
    b["s" + std::to_string(i)] = g.unit();
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(stats::paired_bootstrap(a, b, {10'000, 1, 1}));
  }
}
BENCHMARK(BM_paired_bootstrap)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
