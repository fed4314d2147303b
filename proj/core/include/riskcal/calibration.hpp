#pragma once

// Calibration diagnostics: reliability curves, Expected Calibration Error
// and Brier score over (confidence, binary label) pairs.
//
// Binning is equal-width over [0,1]: bin k covers [k/B, (k+1)/B), with the
// final bin closed at 1.0. Empty bins carry zero ECE weight and are omitted
// from the curve output.

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace riskcal {

inline constexpr std::size_t kDefaultReliabilityBins = 10;

struct ReliabilityBin {
  double lower = 0.0;
  double upper = 0.0;
  double mean_confidence = 0.0;
  double empirical_accuracy = 0.0;
  std::size_t count = 0;
};

struct ReliabilityCurve {
  std::vector<ReliabilityBin> bins;  // populated bins only, ascending
  std::size_t num_bins = 0;          // binning resolution incl. empty bins
  std::size_t n = 0;                 // total records binned
};

struct CalibrationSummary {
  double ece = 0.0;
  double brier = 0.0;
  std::size_t n = 0;
};

// confidences[i] in [0,1] paired with labels[i] in {0,1}. Throws
// ValidationError on length mismatch, empty input, or num_bins == 0.
ReliabilityCurve reliability_curve(std::span<const double> confidences,
                                   std::span<const int> labels,
                                   std::size_t num_bins = kDefaultReliabilityBins);

// Sum over populated bins of (count/n) * |accuracy - mean confidence|.
double expected_calibration_error(std::span<const double> confidences,
                                  std::span<const int> labels,
                                  std::size_t num_bins = kDefaultReliabilityBins);

// Mean squared difference between confidence and label.
double brier_score(std::span<const double> confidences,
                   std::span<const int> labels);

CalibrationSummary calibration_summary(std::span<const double> confidences,
                                       std::span<const int> labels,
                                       std::size_t num_bins = kDefaultReliabilityBins);

// Plot-ready CSV with columns bin_lower, bin_upper, mean_confidence,
// empirical_accuracy, count.
std::string curve_to_csv(const ReliabilityCurve& curve);

}  // namespace riskcal
