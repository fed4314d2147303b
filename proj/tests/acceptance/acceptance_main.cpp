// End-to-end acceptance checks. Each criterion prints one [PASS]/[FAIL]
// line; the exit status is the number of failed criteria.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "riskcal/confidence.hpp"
#include "riskcal/conformal.hpp"
#include "riskcal/matcher.hpp"
#include "riskcal/record.hpp"
#include "riskcal/rng.hpp"
#include "riskcal/synthetic.hpp"

namespace fs = std::filesystem;
using namespace riskcal;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                       start)
      .count();
}

std::string format_detail(const char* fmt, double a, double b = 0.0) {
  char buf[128];
  std::snprintf(buf, sizeof(buf), fmt, a, b);
  return buf;
}

Dataset dataset_from(const std::vector<double>& confidences,
                     const std::vector<int>& labels) {
  Dataset ds;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    ExtractionRecord rec;
    rec.record_id = "r" + std::to_string(i);
    rec.doc_id = "d" + std::to_string(i / 25);
    rec.domain = "accept";
    rec.category = "c";
    rec.span_text = "s";
    rec.token_probs = {confidences[i]};
    rec.label = labels[i];
    ds.records.push_back(std::move(rec));
  }
  return ds;
}

// --- criterion 1: threshold search equals the brute-force oracle ----------

Outcome threshold_oracle_equivalence() {
  const auto start = std::chrono::steady_clock::now();
  riskcal::Rng rng(4001);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = oracle::random_instance(rng, 50, trial % 2 == 0);
    const double alpha = 0.01 * static_cast<double>(1 + rng.below(50));
    const double expected = oracle::threshold(inst.scores, inst.labels, alpha);
    const Threshold got = fdr_threshold(inst.scores, inst.labels, alpha);
    const bool same = std::isinf(expected)
                          ? got.reject_all()
                          : (!got.reject_all() && got.value == expected);
    if (!same) {
      return {false, format_detail(" (mismatch at trial %.0f)",
                                   static_cast<double>(trial))};
    }
  }
  const double elapsed = seconds_since(start);
  if (elapsed >= 10.0) {
    return {false, format_detail(" (too slow: %.2fs)", elapsed)};
  }
  return {true, format_detail(" (1000 instances, %.2fs)", elapsed)};
}

// --- criterion 2: fitted thresholds honor alpha on their own data ---------

Outcome calibration_set_guarantee() {
  riskcal::Rng rng(4002);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto inst = oracle::random_instance(rng, 200, trial % 3 == 0);
    const double alpha = 0.01 * static_cast<double>(1 + rng.below(50));
    const Threshold tau = fdr_threshold(inst.scores, inst.labels, alpha);
    if (tau.reject_all()) continue;
    if (empirical_fdr(inst.scores, inst.labels, tau.value) > alpha) {
      return {false, format_detail(" (violated at trial %.0f, alpha %.2f)",
                                   static_cast<double>(trial), alpha)};
    }
  }
  return {true, " (1000 instances)"};
}

// --- criterion 3: mean test-set FDR stays near the target -----------------

Outcome statistical_fdr_control() {
  const auto start = std::chrono::steady_clock::now();
  RegimeConfig config = preset(kOverconfidentPreset);
  config.n = 4000;
  config.seed = 11;
  const Dataset ds = generate(config);

  double fdr_sum = 0.0;
  const int n_splits = 500;
  for (int i = 1; i <= n_splits; ++i) {
    const SplitResult parts = split(ds, static_cast<std::uint64_t>(i), 0.5);
    std::vector<double> cal_scores, test_scores;
    std::vector<int> cal_labels, test_labels;
    for (const auto& s : score_dataset(parts.calibration)) {
      cal_scores.push_back(s.score);
      cal_labels.push_back(s.label);
    }
    for (const auto& s : score_dataset(parts.test)) {
      test_scores.push_back(s.score);
      test_labels.push_back(s.label);
    }
    const Threshold tau = fdr_threshold(cal_scores, cal_labels, 0.10);
    const EvalMetrics m = evaluate(test_scores, test_labels, tau);
    fdr_sum += m.empirical_fdr.value_or(0.0);
  }
  const double mean_fdr = fdr_sum / n_splits;
  const double elapsed = seconds_since(start);
  if (elapsed >= 60.0) {
    return {false, format_detail(" (too slow: %.2fs)", elapsed)};
  }
  if (mean_fdr > 0.12) {
    return {false, format_detail(" (mean test FDR %.4f > 0.12)", mean_fdr)};
  }
  return {true,
          format_detail(" (500 splits, mean test FDR %.4f, %.2fs)", mean_fdr,
                        elapsed)};
}

// --- criterion 4: thresholds and rejection are monotone in alpha ----------

Outcome monotonic_in_alpha() {
  riskcal::Rng rng(4004);
  const std::vector<double> alphas{0.01, 0.03, 0.05, 0.10, 0.15, 0.20, 0.25};
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 50 + rng.below(1951);
    const double accuracy = 0.55 + 0.43 * rng.uniform();
    const double ca = 1.0 + 9.0 * rng.uniform();
    const double cb = 0.5 + 4.0 * rng.uniform();
    const double ia = 0.5 + 4.0 * rng.uniform();
    const double ib = 0.5 + 4.0 * rng.uniform();
    std::vector<double> conf;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
      const int y = rng.bernoulli(accuracy) ? 1 : 0;
      const double c = y == 1 ? rng.beta(ca, cb) : rng.beta(ia, ib);
      conf.push_back(std::clamp(c, 1e-12, 1.0 - 1e-12));
      labels.push_back(y);
    }
    const auto result = sweep(dataset_from(conf, labels), alphas, GroupBy{},
                              static_cast<std::uint64_t>(trial + 1));
    const auto& rows = result.begin()->second;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (rows[i].threshold.value > rows[i - 1].threshold.value ||
          rows[i].metrics.rejection_pct > rows[i - 1].metrics.rejection_pct) {
        return {false, format_detail(" (violated at trial %.0f)",
                                     static_cast<double>(trial))};
      }
    }
  }
  return {true, " (100 datasets x 7 levels)"};
}

// --- criteria 5 and 6: the two synthetic regimes behave as documented -----

Outcome underconfident_regime() {
  RegimeConfig config = preset(kUnderconfidentPreset);
  config.seed = 11;
  const Dataset ds = generate(config);
  const auto result = sweep(ds, {0.01, 0.03, 0.05, 0.10}, GroupBy{}, 11);
  const auto& rows = result.begin()->second;
  if (std::fabs(rows[0].metrics.rejection_pct - 100.0) > 0.5) {
    return {false, format_detail(" (rejection %.2f%% at the strictest level)",
                                 rows[0].metrics.rejection_pct)};
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (std::fabs(rows[i].metrics.rejection_pct) > 0.5) {
      return {false,
              format_detail(" (rejection %.2f%% at alpha %.2f)",
                            rows[i].metrics.rejection_pct, rows[i].alpha)};
    }
    if (!rows[i].metrics.precision || *rows[i].metrics.precision < 0.97) {
      return {false,
              format_detail(" (precision %.4f at alpha %.2f)",
                            rows[i].metrics.precision.value_or(0.0),
                            rows[i].alpha)};
    }
  }
  return {true, " (reject-all at 0.01; accept-all with precision >= 0.97 above)"};
}

Outcome overconfident_regime() {
  RegimeConfig config = preset(kOverconfidentPreset);
  config.seed = 11;
  const Dataset ds = generate(config);
  const auto result = sweep(ds, {0.05, 0.10, 0.25}, GroupBy{}, 11);
  const auto& rows = result.begin()->second;
  if (rows[0].metrics.rejection_pct != 100.0) {
    return {false, format_detail(" (rejection %.2f%% at alpha 0.05)",
                                 rows[0].metrics.rejection_pct)};
  }
  if (rows[1].metrics.rejection_pct <= 5.0 ||
      rows[1].metrics.rejection_pct >= 95.0) {
    return {false, format_detail(" (rejection %.2f%% at alpha 0.10)",
                                 rows[1].metrics.rejection_pct)};
  }
  if (rows[2].metrics.rejection_pct >= 5.0) {
    return {false, format_detail(" (rejection %.2f%% at alpha 0.25)",
                                 rows[2].metrics.rejection_pct)};
  }
  return {true, format_detail(" (100%% / %.1f%% / %.1f%% rejection)",
                              rows[1].metrics.rejection_pct,
                              rows[2].metrics.rejection_pct)};
}

// --- criterion 7: calibration metrics equal a straight-line oracle --------

Outcome calibration_metric_oracle() {
  riskcal::Rng rng(4007);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.below(10000);
    std::vector<double> conf;
    std::vector<int> labels;
    for (std::size_t i = 0; i < n; ++i) {
      double c = 0.0;
      switch (trial % 4) {
        case 0: c = rng.uniform(); break;
        case 1: c = rng.beta(6.0, 2.0); break;
        case 2: c = rng.beta(2.0, 6.0); break;
        // Point masses on the bin edges stress the boundary convention.
        case 3: c = 0.1 * static_cast<double>(rng.below(11)); break;
      }
      conf.push_back(std::min(c, 1.0));
      labels.push_back(rng.bernoulli(0.75) ? 1 : 0);
    }
    const auto expected = oracle::ece_brier(conf, labels, 10);
    const double ece = expected_calibration_error(conf, labels, 10);
    const double brier = brier_score(conf, labels);
    if (std::fabs(ece - expected.ece) > 1e-12 ||
        std::fabs(brier - expected.brier) > 1e-12) {
      return {false, format_detail(" (diverged at trial %.0f)",
                                   static_cast<double>(trial))};
    }
  }
  return {true, " (200 datasets up to n=10000, tolerance 1e-12)"};
}

// --- criterion 8: confidence arithmetic identities -------------------------

Outcome confidence_identities() {
  const std::vector<double> two_tokens{0.9, 0.4};
  if (std::fabs(span_confidence(two_tokens) - 0.6) > 1e-12) {
    return {false, " (geometric mean of {0.9, 0.4} is off)"};
  }
  for (int i = 0; i < 1000; ++i) {
    const double p = 1e-6 + i * (1.0 - 2e-6) / 999.0;
    if (std::fabs(sigmoid(logit_score(p)) - p) > 1e-9) {
      return {false, format_detail(" (round trip off at p=%.6f)", p)};
    }
  }
  if (std::fabs(logit_score(0.380) - (-0.4895)) > 5e-4) {
    return {false, format_detail(" (logit(0.380) = %.5f)", logit_score(0.380))};
  }
  return {true, " (geometric mean, logit round trip, anchor value)"};
}

// --- criterion 9: matcher fixture and symmetry -----------------------------

Outcome matcher_fixture_and_symmetry() {
  const std::string fixtures = RISKCAL_FIXTURE_DIR;
  const Dataset preds =
      load_dataset_strict(fixtures + "/match/predictions.jsonl");
  const GoldCorpus gold = load_gold(fixtures + "/match/gold.jsonl");
  const GoldCorpus pred_rels =
      load_gold(fixtures + "/match/pred_relations.jsonl");
  const MatchReport report =
      match_against_gold(preds, gold, relations_by_doc(pred_rels));

  const bool entity_ok =
      report.entities.tp == 5 && report.entities.fp == 4 &&
      report.entities.fn == 5 &&
      std::fabs(report.entities.precision - 5.0 / 9.0) < 1e-12 &&
      std::fabs(report.entities.recall - 0.5) < 1e-12 &&
      std::fabs(report.entities.f1 - 10.0 / 19.0) < 1e-12;
  const bool relation_ok =
      report.relations.tp == 2 && report.relations.fp == 3 &&
      report.relations.fn == 1 &&
      std::fabs(report.relations.precision - 0.4) < 1e-12 &&
      std::fabs(report.relations.recall - 2.0 / 3.0) < 1e-12 &&
      std::fabs(report.relations.f1 - 0.5) < 1e-12;
  if (!entity_ok || !relation_ok) {
    return {false, format_detail(" (fixture counts off: entities %.0f/%.0f)",
                                 static_cast<double>(report.entities.tp),
                                 static_cast<double>(report.entities.fp))};
  }

  riskcal::Rng rng(4009);
  const char* spans[] = {"s0", "s1", "s2", "s3", "s4", "s5"};
  const char* labels[] = {"a", "b"};
  for (int trial = 0; trial < 100; ++trial) {
    EntitiesByDoc left, right;
    for (int d = 0; d < 3; ++d) {
      const std::string doc = "d" + std::to_string(d);
      const std::size_t nl = rng.below(7);
      const std::size_t nr = rng.below(7);
      for (std::size_t i = 0; i < nl; ++i) {
        left[doc].push_back({spans[rng.below(6)], labels[rng.below(2)]});
      }
      for (std::size_t i = 0; i < nr; ++i) {
        right[doc].push_back({spans[rng.below(6)], labels[rng.below(2)]});
      }
    }
    const Prf forward = match_entity_sets(left, right);
    const Prf backward = match_entity_sets(right, left);
    if (forward.tp != backward.tp || forward.fp != backward.fn ||
        forward.fn != backward.fp ||
        forward.precision != backward.recall ||
        forward.recall != backward.precision ||
        std::fabs(forward.f1 - backward.f1) > 1e-12) {
      return {false, format_detail(" (symmetry broken at pair %.0f)",
                                   static_cast<double>(trial))};
    }
  }
  return {true, " (5-doc fixture exact; 100 random swap pairs)"};
}

// --- criterion 10: the CLI pipeline is byte-deterministic ------------------

int run_cli(const std::string& args) {
  const std::string cmd = std::string(RISKCAL_BIN) + " " + args +
                          " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return raw == -1 ? -1 : WEXITSTATUS(raw);
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

Outcome pipeline_determinism() {
  const fs::path base = fs::temp_directory_path() / "riskcal_acceptance_e2e";
  fs::remove_all(base);

  auto run_pipeline = [&base](const std::string& name,
                              const std::string& extra) -> fs::path {
    const fs::path dir = base / name;
    fs::create_directories(dir);
    const std::string records = (dir / "records.jsonl").string();
    if (run_cli("simulate --preset overconfident-freetext --n 20000 --seed 11 "
                "--out " + records) != 0) {
      return {};
    }
    if (run_cli("calibrate --input " + records +
                " --alpha 0.1 --seed 11 --grouping both " + extra + "--out " +
                dir.string()) != 0) {
      return {};
    }
    if (run_cli("sweep --input " + records +
                " --alpha 0.03 --alpha 0.1 --alpha 0.25 --seed 11 "
                "--grouping both " + extra + "--out " + dir.string()) != 0) {
      return {};
    }
    return dir;
  };

  const fs::path first = run_pipeline("run1", "");
  const fs::path second = run_pipeline("run2", "");
  const fs::path threaded = run_pipeline("run3", "--threads 4 ");
  if (first.empty() || second.empty() || threaded.empty()) {
    return {false, " (a pipeline stage exited nonzero)"};
  }

  const char* files[] = {"records.jsonl", "calibrate.csv", "calibrate.md",
                         "sweep.csv", "sweep.md", "curve_GLOBAL.csv"};
  for (const char* file : files) {
    const std::string a = slurp(first / file);
    if (a.empty()) {
      return {false, std::string(" (missing or empty ") + file + ")"};
    }
    if (a != slurp(second / file)) {
      return {false, std::string(" (rerun differs in ") + file + ")"};
    }
    if (a != slurp(threaded / file)) {
      return {false, std::string(" (threaded run differs in ") + file + ")"};
    }
  }
  return {true, " (simulate/calibrate/sweep byte-identical; threads agree)"};
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"threshold search equals brute-force oracle", threshold_oracle_equivalence},
      {"fitted thresholds honor alpha on calibration data", calibration_set_guarantee},
      {"mean test FDR near target on random splits", statistical_fdr_control},
      {"thresholds and rejection monotone in alpha", monotonic_in_alpha},
      {"underconfident regime: reject-all then accept-all", underconfident_regime},
      {"overconfident regime: sharp rejection transition", overconfident_regime},
      {"calibration metrics equal straight-line oracle", calibration_metric_oracle},
      {"confidence arithmetic identities", confidence_identities},
      {"matcher fixture exact and swap-symmetric", matcher_fixture_and_symmetry},
      {"cli pipeline byte-deterministic", pipeline_determinism},
  };

  int failures = 0;
  for (const auto& criterion : criteria) {
    Outcome outcome;
    try {
      outcome = criterion.run();
    } catch (const std::exception& e) {
      outcome = {false, std::string(" (exception: ") + e.what() + ")"};
    }
    std::printf("[%s] %s%s\n", outcome.pass ? "PASS" : "FAIL", criterion.name,
                outcome.detail.c_str());
    if (!outcome.pass) ++failures;
  }
  return failures;
}
