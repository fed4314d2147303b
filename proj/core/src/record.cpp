#include "riskcal/record.hpp"

#include <fstream>
#include <set>
#include <unordered_set>

#include <json.hpp>

#include "riskcal/errors.hpp"

namespace riskcal {

namespace {

using nlohmann::ordered_json;

const std::set<std::string> kKnownKeys = {
    "record_id", "doc_id", "domain",     "category",  "span_text",
    "token_probs", "fact_score", "gold_match", "label"};

std::string require_string(const ordered_json& obj, const char* key) {
  auto it = obj.find(key);
  if (it == obj.end()) {
    throw ValidationError(std::string("missing required key \"") + key + "\"");
  }
  if (!it->is_string()) {
    throw ValidationError(std::string("key \"") + key + "\" must be a string");
  }
  return it->get<std::string>();
}

}  // namespace

ExtractionRecord parse_record(std::string_view line,
                              std::vector<std::string>* warnings) {
  ordered_json obj = ordered_json::parse(line, nullptr, false);
  if (obj.is_discarded()) {
    throw ParseError("malformed record line (invalid JSON)");
  }
  if (!obj.is_object()) {
    throw ParseError("record line must be a JSON object");
  }

  ExtractionRecord rec;
  rec.record_id = require_string(obj, "record_id");
  rec.doc_id = require_string(obj, "doc_id");
  rec.domain = require_string(obj, "domain");
  rec.category = require_string(obj, "category");
  rec.span_text = require_string(obj, "span_text");

  auto probs_it = obj.find("token_probs");
  if (probs_it == obj.end() || !probs_it->is_array()) {
    throw ValidationError("token_probs missing or not an array");
  }
  if (probs_it->empty()) {
    throw ValidationError("token_probs empty");
  }
  rec.token_probs.reserve(probs_it->size());
  for (const auto& v : *probs_it) {
    if (!v.is_number()) {
      throw ValidationError("token_probs element is not a number");
    }
    const double p = v.get<double>();
    if (!(p > 0.0) || p > 1.0) {
      throw ValidationError("token_probs element out of range (0,1]");
    }
    rec.token_probs.push_back(p);
  }

  if (auto it = obj.find("fact_score"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      throw ValidationError("fact_score must be an integer");
    }
    const int score = it->get<int>();
    if (score < 0 || score > 3) {
      throw ValidationError("fact_score out of range (expected 0..3)");
    }
    rec.fact_score = score;
  }
  if (auto it = obj.find("gold_match"); it != obj.end() && !it->is_null()) {
    if (!it->is_boolean()) {
      throw ValidationError("gold_match must be a boolean");
    }
    rec.gold_match = it->get<bool>();
  }
  if (auto it = obj.find("label"); it != obj.end() && !it->is_null()) {
    if (!it->is_number_integer()) {
      throw ValidationError("label must be 0 or 1");
    }
    const int label = it->get<int>();
    if (label != 0 && label != 1) {
      throw ValidationError("label must be 0 or 1");
    }
    rec.label = label;
  }

  if (warnings) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
      if (!kKnownKeys.contains(it.key())) {
        warnings->push_back("record \"" + rec.record_id + "\": unknown key \"" +
                            it.key() + "\" ignored");
      }
    }
  }
  return rec;
}

std::string serialize_record(const ExtractionRecord& record) {
  ordered_json obj;
  obj["record_id"] = record.record_id;
  obj["doc_id"] = record.doc_id;
  obj["domain"] = record.domain;
  obj["category"] = record.category;
  obj["span_text"] = record.span_text;
  obj["token_probs"] = record.token_probs;
  if (record.fact_score) obj["fact_score"] = *record.fact_score;
  if (record.gold_match) obj["gold_match"] = *record.gold_match;
  if (record.label) obj["label"] = *record.label;
  return obj.dump();
}

LoadResult load_dataset(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path.string());
  }

  LoadResult result;
  result.dataset.provenance = path.string();
  std::unordered_set<std::string> seen_ids;

  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    ExtractionRecord rec;
    try {
      rec = parse_record(line, &result.warnings);
    } catch (const ParseError& e) {
      result.errors.push_back({line_number, e.what()});
      continue;
    } catch (const ValidationError& e) {
      result.errors.push_back({line_number, e.what()});
      continue;
    }
    if (!seen_ids.insert(rec.record_id).second) {
      throw ValidationError("duplicate record_id \"" + rec.record_id +
                            "\" at line " + std::to_string(line_number));
    }
    result.dataset.records.push_back(std::move(rec));
  }
  if (in.bad()) {
    throw IoError("read failure on " + path.string());
  }
  if (line_number == 0) {
    result.warnings.push_back("empty input file: " + path.string());
  }
  return result;
}

Dataset load_dataset_strict(const std::filesystem::path& path) {
  LoadResult result = load_dataset(path);
  if (!result.ok()) {
    const auto& first = result.errors.front();
    throw ValidationError(path.string() + ": " +
                          std::to_string(result.errors.size()) +
                          " malformed line(s); first at line " +
                          std::to_string(first.line_number) + ": " +
                          first.message);
  }
  return std::move(result.dataset);
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open " + path.string() + " for writing");
  }
  for (const auto& rec : dataset.records) {
    out << serialize_record(rec) << '\n';
  }
  if (!out) {
    throw IoError("write failure on " + path.string());
  }
}

std::string GroupKey::label() const {
  if (is_global()) return "GLOBAL";
  if (domain && category) return *domain + "/" + *category;
  return domain ? *domain : *category;
}

std::map<GroupKey, Dataset> group_by(const Dataset& dataset, GroupBy keys) {
  std::map<GroupKey, Dataset> groups;
  for (const auto& rec : dataset.records) {
    GroupKey key;
    if (keys.domain) key.domain = rec.domain;
    if (keys.category) key.category = rec.category;
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) {
      it->second.provenance = dataset.provenance + " [" + key.label() + "]";
    }
    it->second.records.push_back(rec);
  }
  if (groups.empty()) {
    // Degenerate input: keep the global group visible so downstream stages
    // can report "no data" uniformly.
    groups.emplace(GroupKey{}, Dataset{{}, dataset.provenance});
  }
  return groups;
}

}  // namespace riskcal
