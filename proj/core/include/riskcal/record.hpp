#pragma once

// Record data model and line-oriented ingestion. One record per line in a
// JSON object with lowercase keys:
//
//   record_id    string, unique within a dataset
//   doc_id       string
//   domain       string tag (e.g. "fda", "radgraph")
//   category     string tag (FDA section name or RadGraph label)
//   span_text    string
//   token_probs  array of numbers, each in (0, 1], non-empty
//   fact_score   optional integer in {0,1,2,3}
//   gold_match   optional boolean
//   label        optional 0/1
//
// Unknown keys are ignored with a warning. The line format streams: files
// with 100k+ records are ingested in a single sequential pass.

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace riskcal {

struct ExtractionRecord {
  std::string record_id;
  std::string doc_id;
  std::string domain;
  std::string category;
  std::string span_text;
  std::vector<double> token_probs;
  std::optional<int> fact_score;
  std::optional<bool> gold_match;
  std::optional<int> label;

  bool operator==(const ExtractionRecord&) const = default;

  // True if any of fact_score / gold_match / label is present.
  bool has_label_source() const {
    return fact_score.has_value() || gold_match.has_value() || label.has_value();
  }
};

struct Dataset {
  std::vector<ExtractionRecord> records;
  std::string provenance;  // source path or generator description

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

// Parses one line. Throws ParseError on malformed syntax, ValidationError on
// invariant violations (empty token_probs, probability outside (0,1],
// fact_score outside 0..3, label not 0/1). Unknown keys append to *warnings
// when provided.
ExtractionRecord parse_record(std::string_view line,
                              std::vector<std::string>* warnings = nullptr);

// Inverse of parse_record; emits one JSON line with keys in the documented
// order. parse_record(serialize_record(r)) == r.
std::string serialize_record(const ExtractionRecord& record);

struct LineError {
  std::size_t line_number;  // 1-based
  std::string message;
};

struct LoadResult {
  Dataset dataset;                  // successfully parsed records, file order
  std::vector<LineError> errors;    // per-line parse/validation failures
  std::vector<std::string> warnings;

  bool ok() const { return errors.empty(); }
};

// Reads a line-delimited record file. Blank lines are skipped. Throws
// IoError if the file cannot be read and ValidationError on a duplicate
// record_id; per-line errors are collected, not thrown. An empty file yields
// an empty dataset plus a warning.
LoadResult load_dataset(const std::filesystem::path& path);

// As load_dataset, but throws ValidationError if any line failed.
Dataset load_dataset_strict(const std::filesystem::path& path);

void save_dataset(const Dataset& dataset, const std::filesystem::path& path);

// Grouping key: the (domain, category) coordinates a threshold is fitted
// for. Unset parts mean "pooled over that coordinate"; both unset is the
// global group.
struct GroupKey {
  std::optional<std::string> domain;
  std::optional<std::string> category;

  bool is_global() const { return !domain && !category; }
  std::string label() const;  // "GLOBAL", "fda", "obs-u" or "fda/obs-u"

  auto operator<=>(const GroupKey&) const = default;
};

struct GroupBy {
  bool domain = false;
  bool category = false;
};

// Partitions a dataset by the selected keys. Record order within each group
// follows input order; grouping by nothing yields a single global group.
std::map<GroupKey, Dataset> group_by(const Dataset& dataset, GroupBy keys);

}  // namespace riskcal
