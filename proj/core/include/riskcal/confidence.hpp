#pragma once

// Span-level confidence aggregation and the logit transform used as the
// nonconformity score. A span's confidence is the geometric mean of its
// per-token probabilities, computed in log space so long spans do not
// underflow. Confidence is clamped into [kConfidenceEpsilon,
// 1 - kConfidenceEpsilon] at this single site so the logit stays finite;
// values within epsilon of 0 or 1 collapse onto the clamp boundary.

#include <span>

namespace riskcal {

inline constexpr double kConfidenceEpsilon = 1e-12;

// Geometric mean of token probabilities, clamped. Requires a non-empty list
// with every element in (0, 1]; throws ValidationError otherwise.
double span_confidence(std::span<const double> token_probs);

// log(p / (1 - p)). Defined for p in (0, 1); strictly increasing.
double logit_score(double confidence);

// Inverse of logit_score on the open interval; maps +inf -> 1 and -inf -> 0
// so the reject-all sentinel renders as a probability cutoff of 1.
double sigmoid(double score);

}  // namespace riskcal
