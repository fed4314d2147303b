#pragma once

// Deterministic synthetic-dataset generator. Labels are Bernoulli draws at a
// configured baseline accuracy; confidences come from class-conditional Beta
// distributions, emitted as single-token records so span confidence equals
// the drawn value. Two shipped presets reproduce opposite miscalibration
// regimes: an underconfident model over structured fields whose baseline
// error rate already satisfies loose FDR targets, and an overconfident
// free-text model whose reliability curve sits below the diagonal.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "riskcal/record.hpp"

namespace riskcal {

struct BetaParams {
  double a = 1.0;
  double b = 1.0;
};

// Optional per-category overrides; unset fields inherit the regime values.
struct CategorySpec {
  std::string name;
  double weight = 0.0;
  std::optional<double> baseline_accuracy;
  std::optional<BetaParams> correct_conf;
  std::optional<BetaParams> incorrect_conf;
};

struct RegimeConfig {
  std::size_t n = 0;
  double baseline_accuracy = 0.0;      // in (0, 1]
  BetaParams correct_conf;             // confidence given label 1
  BetaParams incorrect_conf;           // confidence given label 0
  std::vector<CategorySpec> categories;  // weights must sum to 1 when present
  std::uint64_t seed = 0;
  std::string domain = "synthetic";
  std::size_t records_per_doc = 25;
};

// Throws ConfigError describing the first violated constraint.
void validate_config(const RegimeConfig& config);

// Generates exactly config.n labeled records from a single RNG stream
// seeded with config.seed: per record the draws are category (when
// categories are configured), label, then confidence. Identical configs
// produce identical datasets.
Dataset generate(const RegimeConfig& config);

inline constexpr std::string_view kUnderconfidentPreset =
    "underconfident-structured";
inline constexpr std::string_view kOverconfidentPreset =
    "overconfident-freetext";

// Named regime with frozen distribution constants (n = 20,000, seed = 1 by
// default; both are meant to be overridden). Throws ConfigError on unknown
// names.
RegimeConfig preset(std::string_view name);

// Declarative JSON config: either {"preset": name, ...overrides for n and
// seed...} or the full field set {"n", "baseline_accuracy", "correct_conf":
// {"a","b"}, "incorrect_conf": {"a","b"}, "seed", "domain",
// "records_per_doc", "categories": [{"name","weight", ...overrides...}]}.
// Unknown keys are rejected so typos cannot silently change a run.
RegimeConfig load_regime_config(const std::string& path);

}  // namespace riskcal
