#include "riskcal/conformal.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <utility>

#include "riskcal/confidence.hpp"
#include "riskcal/errors.hpp"
#include "riskcal/rng.hpp"

namespace riskcal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ConfigError("alpha must lie in (0, 1)");
  }
}

void check_lengths(std::size_t n_scores, std::size_t n_labels) {
  if (n_scores != n_labels) {
    throw ValidationError("scores and labels differ in length");
  }
}

// Calibration set sorted by score. Scanning unique scores ascending against
// suffix error counts answers a threshold query in one linear pass, and the
// sort is shared when many alphas are fit on the same split.
struct CalibrationFit {
  std::vector<double> scores;              // ascending
  std::vector<std::size_t> suffix_errors;  // errors among scores[i..n)

  CalibrationFit(std::span<const double> raw_scores,
                 std::span<const int> raw_labels) {
    check_lengths(raw_scores.size(), raw_labels.size());
    if (raw_scores.empty()) {
      throw ValidationError("calibration set is empty");
    }
    const std::size_t n = raw_scores.size();
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return raw_scores[a] < raw_scores[b];
    });
    scores.resize(n);
    suffix_errors.assign(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) {
      scores[i] = raw_scores[order[i]];
    }
    for (std::size_t i = n; i-- > 0;) {
      suffix_errors[i] =
          suffix_errors[i + 1] + (raw_labels[order[i]] == 0 ? 1 : 0);
    }
  }

  Threshold threshold_for(double alpha, const GroupKey& group) const {
    const std::size_t n = scores.size();
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && scores[i] == scores[i - 1]) {
        continue;  // same candidate as the previous entry
      }
      const double accepted = static_cast<double>(n - i);
      const double errors = static_cast<double>(suffix_errors[i]);
      if (errors / accepted <= alpha) {
        return Threshold{scores[i], alpha, group};
      }
    }
    return Threshold::make_reject_all(alpha, group);
  }
};

struct GroupData {
  std::vector<double> confidences;
  std::vector<double> scores;
  std::vector<int> labels;
};

GroupKey key_for(const ScoredRecord& record, GroupBy grouping) {
  GroupKey key;
  if (grouping.domain) key.domain = record.domain;
  if (grouping.category) key.category = record.category;
  return key;
}

std::map<GroupKey, GroupData> group_scored(
    const std::vector<ScoredRecord>& records, GroupBy grouping) {
  std::map<GroupKey, GroupData> groups;
  for (const auto& record : records) {
    GroupData& data = groups[key_for(record, grouping)];
    data.confidences.push_back(record.confidence);
    data.scores.push_back(record.score);
    data.labels.push_back(record.label);
  }
  return groups;
}

// Runs fn over all keys, in parallel when asked, and collects results in
// key order so the output never depends on the thread count.
template <typename Fn>
auto per_group(const std::vector<GroupKey>& keys, std::size_t threads, Fn fn)
    -> std::map<GroupKey, decltype(fn(keys.front()))> {
  using Result = decltype(fn(keys.front()));
  std::map<GroupKey, Result> out;
  if (threads <= 1 || keys.size() <= 1) {
    for (const auto& key : keys) {
      out.emplace(key, fn(key));
    }
    return out;
  }
  std::vector<std::future<Result>> futures;
  futures.reserve(keys.size());
  for (const auto& key : keys) {
    futures.push_back(
        std::async(std::launch::async, [&fn, key] { return fn(key); }));
  }
  for (std::size_t i = 0; i < keys.size(); ++i) {
    out.emplace(keys[i], futures[i].get());
  }
  return out;
}

}  // namespace

bool Threshold::reject_all() const { return value == kInf; }

Threshold Threshold::make_reject_all(double alpha, GroupKey group) {
  return Threshold{kInf, alpha, std::move(group)};
}

std::vector<ScoredRecord> score_dataset(const Dataset& dataset) {
  std::vector<ScoredRecord> scored;
  scored.reserve(dataset.records.size());
  for (const auto& record : dataset.records) {
    if (!record.label.has_value()) {
      throw ValidationError("record " + record.record_id +
                            " has no resolved label");
    }
    ScoredRecord out;
    out.record_id = record.record_id;
    out.domain = record.domain;
    out.category = record.category;
    out.confidence = span_confidence(record.token_probs);
    out.score = logit_score(out.confidence);
    out.label = *record.label;
    scored.push_back(std::move(out));
  }
  return scored;
}

SplitResult split(const Dataset& dataset, std::uint64_t seed,
                  double cal_fraction, bool stratify_by_category) {
  if (!(cal_fraction > 0.0 && cal_fraction < 1.0)) {
    throw ConfigError("cal_fraction must lie in (0, 1)");
  }
  SplitResult result;
  result.calibration.provenance = dataset.provenance;
  result.test.provenance = dataset.provenance;

  Rng rng(seed);
  auto shuffle = [&rng](std::vector<std::size_t>& idx) {
    for (std::size_t i = idx.size(); i > 1; --i) {
      std::swap(idx[i - 1], idx[rng.below(i)]);
    }
  };
  auto emit = [&](const std::vector<std::size_t>& idx) {
    const auto n = idx.size();
    const auto n_cal = static_cast<std::size_t>(
        std::ceil(static_cast<double>(n) * cal_fraction));
    for (std::size_t i = 0; i < n; ++i) {
      auto& side = i < n_cal ? result.calibration : result.test;
      side.records.push_back(dataset.records[idx[i]]);
    }
  };

  if (!stratify_by_category) {
    std::vector<std::size_t> idx(dataset.records.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    shuffle(idx);
    emit(idx);
    return result;
  }

  // Per-(domain, category) permutation and ceiling rule; groups are visited
  // in key order so the single RNG stream stays reproducible.
  std::map<GroupKey, std::vector<std::size_t>> strata;
  for (std::size_t i = 0; i < dataset.records.size(); ++i) {
    const auto& r = dataset.records[i];
    strata[GroupKey{r.domain, r.category}].push_back(i);
  }
  for (auto& [key, idx] : strata) {
    shuffle(idx);
    emit(idx);
  }
  return result;
}

double empirical_fdr(std::span<const double> scores,
                     std::span<const int> labels, double t) {
  check_lengths(scores.size(), labels.size());
  std::size_t accepted = 0;
  std::size_t errors = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= t) {
      ++accepted;
      if (labels[i] == 0) ++errors;
    }
  }
  return static_cast<double>(errors) /
         static_cast<double>(std::max<std::size_t>(1, accepted));
}

Threshold fdr_threshold(std::span<const double> scores,
                        std::span<const int> labels, double alpha,
                        GroupKey group) {
  check_alpha(alpha);
  CalibrationFit fit(scores, labels);
  return fit.threshold_for(alpha, group);
}

std::vector<bool> apply_threshold(std::span<const double> scores,
                                  const Threshold& tau) {
  std::vector<bool> accepted(scores.size());
  for (std::size_t i = 0; i < scores.size(); ++i) {
    accepted[i] = scores[i] >= tau.value;
  }
  return accepted;
}

EvalMetrics evaluate(std::span<const double> scores,
                     std::span<const int> labels, const Threshold& tau) {
  check_lengths(scores.size(), labels.size());
  if (scores.empty()) {
    throw ValidationError("test set is empty");
  }
  EvalMetrics metrics;
  metrics.n_test = scores.size();
  std::size_t correct_accepted = 0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (scores[i] >= tau.value) {
      ++metrics.n_accepted;
      if (labels[i] == 1) ++correct_accepted;
    }
  }
  metrics.acceptance_rate = static_cast<double>(metrics.n_accepted) /
                            static_cast<double>(metrics.n_test);
  metrics.rejection_pct = 100.0 * (1.0 - metrics.acceptance_rate);
  if (metrics.n_accepted > 0) {
    metrics.precision = static_cast<double>(correct_accepted) /
                        static_cast<double>(metrics.n_accepted);
    metrics.empirical_fdr = 1.0 - *metrics.precision;
  }
  return metrics;
}

std::map<GroupKey, std::vector<SweepRow>> sweep(const Dataset& dataset,
                                                std::vector<double> alphas,
                                                GroupBy grouping,
                                                std::uint64_t seed,
                                                const RunOptions& options) {
  if (alphas.empty()) {
    throw ConfigError("sweep requires at least one alpha");
  }
  for (double alpha : alphas) check_alpha(alpha);
  std::sort(alphas.begin(), alphas.end());

  const SplitResult parts = split(dataset, seed, options.cal_fraction,
                                  options.stratify_by_category);
  const auto cal_groups = group_scored(score_dataset(parts.calibration), grouping);
  const auto test_groups = group_scored(score_dataset(parts.test), grouping);

  std::vector<GroupKey> keys;
  keys.reserve(cal_groups.size());
  for (const auto& [key, data] : cal_groups) keys.push_back(key);

  auto run_group = [&](const GroupKey& key) {
    const GroupData& cal = cal_groups.at(key);
    const GroupData* test = nullptr;
    if (auto it = test_groups.find(key); it != test_groups.end()) {
      test = &it->second;
    }
    CalibrationFit fit(cal.scores, cal.labels);
    std::vector<SweepRow> rows;
    rows.reserve(alphas.size());
    for (double alpha : alphas) {
      SweepRow row;
      row.alpha = alpha;
      row.threshold = fit.threshold_for(alpha, key);
      row.n_cal = cal.scores.size();
      if (test != nullptr) {
        row.metrics = evaluate(test->scores, test->labels, row.threshold);
        row.n_test = test->scores.size();
      }
      rows.push_back(std::move(row));
    }
    return rows;
  };
  return per_group(keys, options.threads, run_group);
}

std::map<GroupKey, GroupCalibration> calibrate_groups(
    const Dataset& dataset, double alpha, std::uint64_t seed,
    GroupBy grouping, std::size_t num_bins, const RunOptions& options) {
  check_alpha(alpha);

  const auto all_groups = group_scored(score_dataset(dataset), grouping);
  const SplitResult parts = split(dataset, seed, options.cal_fraction,
                                  options.stratify_by_category);
  const auto cal_groups = group_scored(score_dataset(parts.calibration), grouping);
  const auto test_groups = group_scored(score_dataset(parts.test), grouping);

  std::vector<GroupKey> keys;
  keys.reserve(all_groups.size());
  for (const auto& [key, data] : all_groups) keys.push_back(key);

  auto run_group = [&](const GroupKey& key) {
    const GroupData& all = all_groups.at(key);
    GroupCalibration result;
    result.n_records = all.scores.size();
    result.summary = calibration_summary(all.confidences, all.labels, num_bins);
    result.curve = reliability_curve(all.confidences, all.labels, num_bins);

    const GroupData* cal = nullptr;
    if (auto it = cal_groups.find(key); it != cal_groups.end()) {
      cal = &it->second;
      result.n_cal = cal->scores.size();
    }
    const GroupData* test = nullptr;
    if (auto it = test_groups.find(key); it != test_groups.end()) {
      test = &it->second;
      result.n_test = test->scores.size();
    }

    if (cal == nullptr) {
      result.status = GroupStatus::kUnsupported;
      result.threshold = Threshold::make_reject_all(alpha, key);
      return result;
    }
    CalibrationFit fit(cal->scores, cal->labels);
    result.threshold = fit.threshold_for(alpha, key);
    if (test != nullptr) {
      result.metrics = evaluate(test->scores, test->labels, result.threshold);
    }
    return result;
  };
  return per_group(keys, options.threads, run_group);
}

}  // namespace riskcal
