#pragma once

// FDR-controlling conformal calibration: seeded calibration/test splitting,
// threshold search over the empirical false discovery rate, decision
// application, test-set evaluation, alpha sweeps and per-category fits.
//
// The threshold for target level alpha is the smallest candidate t with
//
//     #{i : label_i = 0 and score_i >= t} / max(1, #{i : score_i >= t}) <= alpha
//
// where candidates are the unique observed calibration scores (the empirical
// FDR changes only there, so the infimum is attained at one of them). When no
// candidate satisfies the constraint the threshold is the reject-all
// sentinel, reported as +infinity.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "riskcal/calibration.hpp"
#include "riskcal/record.hpp"

namespace riskcal {

struct Threshold {
  double value = 0.0;  // log-odds; +inf is the reject-all sentinel
  double alpha = 0.0;
  GroupKey group;

  bool reject_all() const;
  static Threshold make_reject_all(double alpha, GroupKey group = {});
};

// Test-set summary. acceptance_rate is the tables' "Cov."; precision and
// empirical_fdr are absent exactly when nothing was accepted.
struct EvalMetrics {
  std::size_t n_test = 0;
  std::size_t n_accepted = 0;
  double rejection_pct = 0.0;    // 100 * (1 - acceptance_rate)
  double acceptance_rate = 0.0;
  std::optional<double> precision;
  std::optional<double> empirical_fdr;  // 1 - precision
};

struct ScoredRecord {
  std::string record_id;
  std::string domain;
  std::string category;
  double confidence = 0.0;  // clamped span confidence
  double score = 0.0;       // logit of confidence
  int label = 0;
};

// Computes span confidence and nonconformity score for every record. Every
// record must carry a resolved binary label; throws ValidationError naming
// the first record_id without one.
std::vector<ScoredRecord> score_dataset(const Dataset& dataset);

struct SplitResult {
  Dataset calibration;
  Dataset test;
};

// Deterministic seeded split: a single Fisher-Yates permutation of the
// record order, first ceil(n * cal_fraction) records to calibration. With
// stratify_by_category the permutation and the ceiling rule apply per
// (domain, category) group instead. Identical seeds give identical splits.
SplitResult split(const Dataset& dataset, std::uint64_t seed,
                  double cal_fraction = 0.5, bool stratify_by_category = false);

// Empirical FDR among records with score >= t; the max(1, .) denominator
// makes an empty accepted set count as zero risk.
double empirical_fdr(std::span<const double> scores,
                     std::span<const int> labels, double t);

// Smallest unique calibration score satisfying the constraint, or the
// reject-all sentinel. Throws on an empty calibration set or alpha outside
// (0,1).
Threshold fdr_threshold(std::span<const double> scores,
                        std::span<const int> labels, double alpha,
                        GroupKey group = {});

// Accept decisions aligned with input order: accepted iff score >= tau
// (ties at the threshold are accepted; the sentinel accepts nothing).
std::vector<bool> apply_threshold(std::span<const double> scores,
                                  const Threshold& tau);

// Metrics over a test set. Throws on an empty test set.
EvalMetrics evaluate(std::span<const double> scores,
                     std::span<const int> labels, const Threshold& tau);

struct SweepRow {
  double alpha = 0.0;
  Threshold threshold;
  EvalMetrics metrics;
  std::size_t n_cal = 0;
  std::size_t n_test = 0;
};

struct RunOptions {
  double cal_fraction = 0.5;
  bool stratify_by_category = false;
  std::size_t threads = 1;  // per-group fits run in parallel when > 1
};

// One split per sweep, reused across all alphas so rows are comparable.
// Rows per group are sorted by alpha ascending. Groups with no calibration
// records are omitted. Output is identical for any threads value.
std::map<GroupKey, std::vector<SweepRow>> sweep(const Dataset& dataset,
                                                std::vector<double> alphas,
                                                GroupBy grouping,
                                                std::uint64_t seed,
                                                const RunOptions& options = {});

enum class GroupStatus {
  kOk,
  kUnsupported,  // no calibration records landed in this group
};

struct GroupCalibration {
  GroupStatus status = GroupStatus::kOk;
  Threshold threshold;                  // meaningful when status == kOk
  std::optional<EvalMetrics> metrics;   // absent when the group has no test records
  CalibrationSummary summary;           // over all labeled records of the group
  ReliabilityCurve curve;
  std::size_t n_records = 0;
  std::size_t n_cal = 0;
  std::size_t n_test = 0;
};

// One global split; each group is then calibrated on its own calibration
// records and evaluated on its own test records, so thresholds depend only
// on the group's data. Diagnostics (ECE, Brier, curve) cover all of the
// group's records.
std::map<GroupKey, GroupCalibration> calibrate_groups(
    const Dataset& dataset, double alpha, std::uint64_t seed,
    GroupBy grouping = {.domain = true, .category = true},
    std::size_t num_bins = kDefaultReliabilityBins,
    const RunOptions& options = {});

}  // namespace riskcal
