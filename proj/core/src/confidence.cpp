#include "riskcal/confidence.hpp"

#include <cmath>
#include <limits>

#include "riskcal/errors.hpp"

namespace riskcal {

double span_confidence(std::span<const double> token_probs) {
  if (token_probs.empty()) {
    throw ValidationError("span_confidence: token_probs empty");
  }
  double log_sum = 0.0;
  for (double p : token_probs) {
    if (!(p > 0.0) || p > 1.0) {
      throw ValidationError("span_confidence: token probability out of (0,1]");
    }
    log_sum += std::log(p);
  }
  const double mean = std::exp(log_sum / static_cast<double>(token_probs.size()));
  if (mean < kConfidenceEpsilon) return kConfidenceEpsilon;
  if (mean > 1.0 - kConfidenceEpsilon) return 1.0 - kConfidenceEpsilon;
  return mean;
}

double logit_score(double confidence) {
  return std::log(confidence / (1.0 - confidence));
}

double sigmoid(double score) {
  if (std::isinf(score)) return score > 0 ? 1.0 : 0.0;
  // Evaluate in the numerically stable branch for either sign.
  if (score >= 0) {
    return 1.0 / (1.0 + std::exp(-score));
  }
  const double e = std::exp(score);
  return e / (1.0 + e);
}

}  // namespace riskcal
