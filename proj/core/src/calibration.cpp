#include "riskcal/calibration.hpp"

#include <cmath>

#include "riskcal/errors.hpp"
#include "riskcal/format.hpp"

namespace riskcal {

namespace {

void check_inputs(std::span<const double> confidences,
                  std::span<const int> labels) {
  if (confidences.size() != labels.size()) {
    throw ValidationError("confidence/label length mismatch");
  }
  if (confidences.empty()) {
    throw ValidationError("no labeled records");
  }
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    if (!(confidences[i] >= 0.0 && confidences[i] <= 1.0)) {
      throw ValidationError("confidence out of [0,1] at index " +
                            std::to_string(i));
    }
    if (labels[i] != 0 && labels[i] != 1) {
      throw ValidationError("label must be 0 or 1 at index " +
                            std::to_string(i));
    }
  }
}

// Bin k covers [k/B, (k+1)/B); the final bin is closed at 1.0.
std::size_t bin_index(double confidence, std::size_t num_bins) {
  auto idx = static_cast<std::size_t>(confidence * static_cast<double>(num_bins));
  return idx >= num_bins ? num_bins - 1 : idx;
}

}  // namespace

ReliabilityCurve reliability_curve(std::span<const double> confidences,
                                   std::span<const int> labels,
                                   std::size_t num_bins) {
  if (num_bins == 0) {
    throw ValidationError("num_bins must be >= 1");
  }
  check_inputs(confidences, labels);

  std::vector<double> conf_sum(num_bins, 0.0);
  std::vector<double> label_sum(num_bins, 0.0);
  std::vector<std::size_t> count(num_bins, 0);
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const std::size_t b = bin_index(confidences[i], num_bins);
    conf_sum[b] += confidences[i];
    label_sum[b] += static_cast<double>(labels[i]);
    ++count[b];
  }

  ReliabilityCurve curve;
  curve.num_bins = num_bins;
  curve.n = confidences.size();
  for (std::size_t b = 0; b < num_bins; ++b) {
    if (count[b] == 0) continue;
    ReliabilityBin bin;
    // Divide per edge rather than scaling a precomputed width so the edges
    // are the correctly rounded values of k/B (0.3, not 3 * 0.1 = 0.30...04).
    bin.lower = static_cast<double>(b) / static_cast<double>(num_bins);
    bin.upper = static_cast<double>(b + 1) / static_cast<double>(num_bins);
    bin.mean_confidence = conf_sum[b] / static_cast<double>(count[b]);
    bin.empirical_accuracy = label_sum[b] / static_cast<double>(count[b]);
    bin.count = count[b];
    curve.bins.push_back(bin);
  }
  return curve;
}

double expected_calibration_error(std::span<const double> confidences,
                                  std::span<const int> labels,
                                  std::size_t num_bins) {
  const ReliabilityCurve curve = reliability_curve(confidences, labels, num_bins);
  const double n = static_cast<double>(curve.n);
  double ece = 0.0;
  for (const auto& bin : curve.bins) {
    ece += (static_cast<double>(bin.count) / n) *
           std::abs(bin.empirical_accuracy - bin.mean_confidence);
  }
  return ece;
}

double brier_score(std::span<const double> confidences,
                   std::span<const int> labels) {
  check_inputs(confidences, labels);
  double sum = 0.0;
  for (std::size_t i = 0; i < confidences.size(); ++i) {
    const double d = confidences[i] - static_cast<double>(labels[i]);
    sum += d * d;
  }
  return sum / static_cast<double>(confidences.size());
}

CalibrationSummary calibration_summary(std::span<const double> confidences,
                                       std::span<const int> labels,
                                       std::size_t num_bins) {
  CalibrationSummary summary;
  summary.ece = expected_calibration_error(confidences, labels, num_bins);
  summary.brier = brier_score(confidences, labels);
  summary.n = confidences.size();
  return summary;
}

std::string curve_to_csv(const ReliabilityCurve& curve) {
  std::string out = "bin_lower,bin_upper,mean_confidence,empirical_accuracy,count\n";
  for (const auto& bin : curve.bins) {
    out += format_double(bin.lower);
    out += ',';
    out += format_double(bin.upper);
    out += ',';
    out += format_double(bin.mean_confidence);
    out += ',';
    out += format_double(bin.empirical_accuracy);
    out += ',';
    out += std::to_string(bin.count);
    out += '\n';
  }
  return out;
}

}  // namespace riskcal
