#include "riskcal/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <utility>

#include "riskcal/confidence.hpp"
#include "riskcal/errors.hpp"
#include "riskcal/rng.hpp"

#include "json.hpp"

namespace riskcal {

namespace {

void check_beta(const BetaParams& params, const std::string& what) {
  if (!(params.a > 0.0) || !std::isfinite(params.a) || !(params.b > 0.0) ||
      !std::isfinite(params.b)) {
    throw ConfigError(what + " Beta parameters must be positive and finite");
  }
}

void check_accuracy(double accuracy, const std::string& what) {
  if (!(accuracy > 0.0 && accuracy <= 1.0)) {
    throw ConfigError(what + " baseline_accuracy must lie in (0, 1]");
  }
}

std::string padded(const char* prefix, std::size_t value, int width) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%s%0*zu", prefix, width, value);
  return buf;
}

using Json = nlohmann::ordered_json;

double number_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number()) {
    throw ConfigError(std::string("config needs numeric key '") + key + "'");
  }
  return it->get<double>();
}

std::size_t count_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_number_unsigned()) {
    throw ConfigError(std::string("config needs non-negative integer key '") +
                      key + "'");
  }
  return it->get<std::size_t>();
}

BetaParams beta_field(const Json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end() || !it->is_object()) {
    throw ConfigError(std::string("config needs object key '") + key +
                      "' with fields 'a' and 'b'");
  }
  for (const auto& [sub, value] : it->items()) {
    if (sub != "a" && sub != "b") {
      throw ConfigError(std::string("unknown key '") + sub + "' in '" + key +
                        "'");
    }
  }
  return BetaParams{number_field(*it, "a"), number_field(*it, "b")};
}

void reject_unknown_keys(const Json& obj, const std::set<std::string>& known,
                         const char* context) {
  for (const auto& [key, value] : obj.items()) {
    if (known.find(key) == known.end()) {
      throw ConfigError(std::string("unknown key '") + key + "' in " +
                        context);
    }
  }
}

}  // namespace

void validate_config(const RegimeConfig& config) {
  check_accuracy(config.baseline_accuracy, "regime");
  check_beta(config.correct_conf, "correct_conf");
  check_beta(config.incorrect_conf, "incorrect_conf");
  if (config.records_per_doc == 0) {
    throw ConfigError("records_per_doc must be at least 1");
  }
  if (config.domain.empty()) {
    throw ConfigError("domain must be non-empty");
  }
  if (config.categories.empty()) {
    return;
  }
  double weight_sum = 0.0;
  std::set<std::string> names;
  for (const auto& category : config.categories) {
    if (category.name.empty()) {
      throw ConfigError("category name must be non-empty");
    }
    if (!names.insert(category.name).second) {
      throw ConfigError("duplicate category '" + category.name + "'");
    }
    if (!(category.weight > 0.0) || !std::isfinite(category.weight)) {
      throw ConfigError("category '" + category.name +
                        "' weight must be positive");
    }
    weight_sum += category.weight;
    if (category.baseline_accuracy.has_value()) {
      check_accuracy(*category.baseline_accuracy,
                     "category '" + category.name + "'");
    }
    if (category.correct_conf.has_value()) {
      check_beta(*category.correct_conf, "category '" + category.name + "'");
    }
    if (category.incorrect_conf.has_value()) {
      check_beta(*category.incorrect_conf, "category '" + category.name + "'");
    }
  }
  if (std::abs(weight_sum - 1.0) > 1e-9) {
    throw ConfigError("category weights must sum to 1");
  }
}

Dataset generate(const RegimeConfig& config) {
  validate_config(config);

  Dataset dataset;
  {
    std::ostringstream provenance;
    provenance << "synthetic domain=" << config.domain
               << " seed=" << config.seed << " n=" << config.n;
    dataset.provenance = provenance.str();
  }
  dataset.records.reserve(config.n);

  Rng rng(config.seed);
  for (std::size_t i = 0; i < config.n; ++i) {
    ExtractionRecord record;
    record.record_id = padded("s", i, 6);
    record.doc_id = padded("d", i / config.records_per_doc, 5);
    record.domain = config.domain;
    record.span_text = padded("span-", i, 6);

    double accuracy = config.baseline_accuracy;
    BetaParams correct = config.correct_conf;
    BetaParams incorrect = config.incorrect_conf;
    if (config.categories.empty()) {
      record.category = "all";
    } else {
      double u = rng.uniform();
      double cumulative = 0.0;
      const CategorySpec* chosen = &config.categories.back();
      for (const auto& category : config.categories) {
        cumulative += category.weight;
        if (u < cumulative) {
          chosen = &category;
          break;
        }
      }
      record.category = chosen->name;
      accuracy = chosen->baseline_accuracy.value_or(accuracy);
      correct = chosen->correct_conf.value_or(correct);
      incorrect = chosen->incorrect_conf.value_or(incorrect);
    }

    const bool is_correct = rng.bernoulli(accuracy);
    const BetaParams& dist = is_correct ? correct : incorrect;
    double confidence = rng.beta(dist.a, dist.b);
    confidence = std::clamp(confidence, kConfidenceEpsilon,
                            1.0 - kConfidenceEpsilon);

    record.token_probs = {confidence};
    record.label = is_correct ? 1 : 0;
    dataset.records.push_back(std::move(record));
  }
  return dataset;
}

RegimeConfig preset(std::string_view name) {
  RegimeConfig config;
  config.n = 20000;
  config.seed = 1;
  if (name == kUnderconfidentPreset) {
    config.baseline_accuracy = 0.977;
    config.correct_conf = {48.0, 30.0};
    config.incorrect_conf = {1.5, 1.0};
    config.domain = "structured";
    return config;
  }
  if (name == kOverconfidentPreset) {
    config.baseline_accuracy = 0.824;
    config.correct_conf = {48.0, 1.3};
    config.incorrect_conf = {3.5, 0.6};
    config.domain = "freetext";
    return config;
  }
  throw ConfigError("unknown preset '" + std::string(name) + "'");
}

RegimeConfig load_regime_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  Json root;
  try {
    root = Json::parse(in);
  } catch (const nlohmann::json::parse_error& err) {
    throw ConfigError(path + ": invalid JSON: " + err.what());
  }
  if (!root.is_object()) {
    throw ConfigError(path + ": config must be a JSON object");
  }

  RegimeConfig config;
  if (root.contains("preset")) {
    if (!root["preset"].is_string()) {
      throw ConfigError("'preset' must be a string");
    }
    reject_unknown_keys(root, {"preset", "n", "seed"}, "preset config");
    config = preset(root["preset"].get<std::string>());
    if (root.contains("n")) config.n = count_field(root, "n");
    if (root.contains("seed")) config.seed = count_field(root, "seed");
    return config;
  }

  reject_unknown_keys(root,
                      {"n", "baseline_accuracy", "correct_conf",
                       "incorrect_conf", "seed", "domain", "records_per_doc",
                       "categories"},
                      "config");
  config.n = count_field(root, "n");
  config.baseline_accuracy = number_field(root, "baseline_accuracy");
  config.correct_conf = beta_field(root, "correct_conf");
  config.incorrect_conf = beta_field(root, "incorrect_conf");
  if (root.contains("seed")) config.seed = count_field(root, "seed");
  if (root.contains("domain")) {
    if (!root["domain"].is_string()) {
      throw ConfigError("'domain' must be a string");
    }
    config.domain = root["domain"].get<std::string>();
  }
  if (root.contains("records_per_doc")) {
    config.records_per_doc = count_field(root, "records_per_doc");
  }
  if (root.contains("categories")) {
    if (!root["categories"].is_array()) {
      throw ConfigError("'categories' must be an array");
    }
    for (const auto& entry : root["categories"]) {
      if (!entry.is_object()) {
        throw ConfigError("category entries must be objects");
      }
      reject_unknown_keys(entry,
                          {"name", "weight", "baseline_accuracy",
                           "correct_conf", "incorrect_conf"},
                          "category");
      CategorySpec spec;
      auto name_it = entry.find("name");
      if (name_it == entry.end() || !name_it->is_string()) {
        throw ConfigError("category needs string key 'name'");
      }
      spec.name = name_it->get<std::string>();
      spec.weight = number_field(entry, "weight");
      if (entry.contains("baseline_accuracy")) {
        spec.baseline_accuracy = number_field(entry, "baseline_accuracy");
      }
      if (entry.contains("correct_conf")) {
        spec.correct_conf = beta_field(entry, "correct_conf");
      }
      if (entry.contains("incorrect_conf")) {
        spec.incorrect_conf = beta_field(entry, "incorrect_conf");
      }
      config.categories.push_back(std::move(spec));
    }
  }
  validate_config(config);
  return config;
}

}  // namespace riskcal
