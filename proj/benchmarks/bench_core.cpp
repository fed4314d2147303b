#include <benchmark/benchmark.h>

#include <vector>

#include "riskcal/calibration.hpp"
#include "riskcal/confidence.hpp"
#include "riskcal/conformal.hpp"
#include "riskcal/rng.hpp"
#include "riskcal/synthetic.hpp"

namespace {

struct ScoredData {
  std::vector<double> scores;
  std::vector<double> confidences;
  std::vector<int> labels;
};

ScoredData scored_data(std::size_t n) {
  riskcal::Rng rng(99);
  ScoredData data;
  data.scores.reserve(n);
  data.confidences.reserve(n);
  data.labels.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const int y = rng.bernoulli(0.85) ? 1 : 0;
    const double c = y == 1 ? rng.beta(8.0, 2.0) : rng.beta(2.0, 3.0);
    const double clamped = std::clamp(c, 1e-12, 1.0 - 1e-12);
    data.confidences.push_back(clamped);
    data.scores.push_back(riskcal::logit_score(clamped));
    data.labels.push_back(y);
  }
  return data;
}

void BM_SpanConfidence(benchmark::State& state) {
  riskcal::Rng rng(7);
  std::vector<double> probs;
  for (int i = 0; i < state.range(0); ++i) {
    probs.push_back(0.01 + 0.98 * rng.uniform());
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(riskcal::span_confidence(probs));
  }
}
BENCHMARK(BM_SpanConfidence)->Arg(1)->Arg(8)->Arg(64);

void BM_FdrThreshold(benchmark::State& state) {
  const ScoredData data = scored_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        riskcal::fdr_threshold(data.scores, data.labels, 0.05));
  }
}
BENCHMARK(BM_FdrThreshold)->Arg(1000)->Arg(10000)->Arg(100000);

void BM_CalibrationSummary(benchmark::State& state) {
  const ScoredData data = scored_data(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        riskcal::calibration_summary(data.confidences, data.labels, 10));
  }
}
BENCHMARK(BM_CalibrationSummary)->Arg(10000)->Arg(100000);

void BM_Sweep(benchmark::State& state) {
  riskcal::RegimeConfig config =
      riskcal::preset(riskcal::kOverconfidentPreset);
  config.n = static_cast<std::size_t>(state.range(0));
  config.seed = 3;
  const riskcal::Dataset ds = riskcal::generate(config);
  const std::vector<double> alphas{0.01, 0.03, 0.05, 0.10, 0.15, 0.20, 0.25};
  for (auto _ : state) {
    benchmark::DoNotOptimize(riskcal::sweep(ds, alphas, riskcal::GroupBy{}, 1));
  }
}
BENCHMARK(BM_Sweep)->Arg(4000)->Arg(20000);

}  // namespace

BENCHMARK_MAIN();
