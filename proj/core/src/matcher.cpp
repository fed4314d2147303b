#include "riskcal/matcher.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>
#include <utility>

#include "riskcal/errors.hpp"

#include "json.hpp"

namespace riskcal {

namespace {

using EntityKey = std::pair<std::string, std::string>;
using RelationKey =
    std::tuple<std::string, std::string, std::string, std::string, std::string>;

EntityKey entity_key(const EntityMention& mention) {
  return {normalize_span(mention.span_text), mention.label};
}

RelationKey relation_key(const RelationTriple& triple) {
  return {normalize_span(triple.source.span_text), triple.source.label,
          normalize_span(triple.target.span_text), triple.target.label,
          triple.relation};
}

struct Counts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  void operator+=(const Counts& other) {
    tp += other.tp;
    fp += other.fp;
    fn += other.fn;
  }
};

// Greedy consumption in prediction order against per-key gold multiplicity.
// The resulting tp equals the per-key minimum of the two multiplicities, and
// the first k duplicates of a key are the ones marked consumed.
template <typename Item, typename KeyFn>
Counts match_doc(const std::vector<Item>& predicted,
                 const std::vector<Item>& gold, KeyFn key_fn,
                 std::vector<char>* consumed = nullptr) {
  std::map<decltype(key_fn(std::declval<const Item&>())), std::size_t> budget;
  for (const auto& item : gold) {
    ++budget[key_fn(item)];
  }
  Counts counts;
  if (consumed != nullptr) {
    consumed->assign(predicted.size(), 0);
  }
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    auto it = budget.find(key_fn(predicted[i]));
    if (it != budget.end() && it->second > 0) {
      --it->second;
      ++counts.tp;
      if (consumed != nullptr) (*consumed)[i] = 1;
    } else {
      ++counts.fp;
    }
  }
  counts.fn = gold.size() - counts.tp;
  return counts;
}

template <typename ByDoc, typename KeyFn>
Prf match_sets(const ByDoc& predicted, const ByDoc& gold, KeyFn key_fn) {
  std::set<std::string> doc_ids;
  for (const auto& [doc_id, items] : predicted) doc_ids.insert(doc_id);
  for (const auto& [doc_id, items] : gold) doc_ids.insert(doc_id);

  using Items = typename ByDoc::mapped_type;
  static const Items kEmpty;
  Counts total;
  for (const auto& doc_id : doc_ids) {
    auto pred_it = predicted.find(doc_id);
    auto gold_it = gold.find(doc_id);
    total += match_doc(pred_it != predicted.end() ? pred_it->second : kEmpty,
                       gold_it != gold.end() ? gold_it->second : kEmpty,
                       key_fn);
  }
  return prf_from_counts(total.tp, total.fp, total.fn);
}

EntityMention parse_mention(const nlohmann::ordered_json& value,
                            const std::string& context) {
  if (!value.is_object()) {
    throw ValidationError(context + " must be an object");
  }
  EntityMention mention;
  for (const char* key : {"span_text", "label"}) {
    auto it = value.find(key);
    if (it == value.end() || !it->is_string()) {
      throw ValidationError(context + " needs string key '" + key + "'");
    }
    auto text = it->get<std::string>();
    if (text.empty()) {
      throw ValidationError(context + " key '" + key + "' is empty");
    }
    (key == std::string_view("span_text") ? mention.span_text
                                          : mention.label) = std::move(text);
  }
  return mention;
}

GoldDoc parse_gold_doc(const std::string& line) {
  nlohmann::ordered_json value;
  try {
    value = nlohmann::ordered_json::parse(line);
  } catch (const nlohmann::json::parse_error& err) {
    throw ParseError(std::string("invalid JSON: ") + err.what());
  }
  if (!value.is_object()) {
    throw ParseError("gold line is not a JSON object");
  }

  GoldDoc doc;
  auto id_it = value.find("doc_id");
  if (id_it == value.end() || !id_it->is_string()) {
    throw ValidationError("missing string key 'doc_id'");
  }
  doc.doc_id = id_it->get<std::string>();
  if (doc.doc_id.empty()) {
    throw ValidationError("'doc_id' is empty");
  }

  if (auto it = value.find("entities"); it != value.end()) {
    if (!it->is_array()) {
      throw ValidationError("'entities' must be an array");
    }
    for (const auto& entry : *it) {
      doc.entities.push_back(parse_mention(entry, "entity"));
    }
  }
  if (auto it = value.find("relations"); it != value.end()) {
    if (!it->is_array()) {
      throw ValidationError("'relations' must be an array");
    }
    for (const auto& entry : *it) {
      if (!entry.is_object()) {
        throw ValidationError("relation must be an object");
      }
      RelationTriple triple;
      auto src = entry.find("source");
      auto tgt = entry.find("target");
      auto rel = entry.find("relation");
      if (src == entry.end() || tgt == entry.end() || rel == entry.end()) {
        throw ValidationError(
            "relation needs keys 'source', 'target', 'relation'");
      }
      triple.source = parse_mention(*src, "relation source");
      triple.target = parse_mention(*tgt, "relation target");
      if (!rel->is_string()) {
        throw ValidationError(
            "'relation' must be one of located_at, modify, suggestive_of");
      }
      if (!is_known_relation(rel->get<std::string>())) {
        throw ValidationError("unknown relation '" + rel->get<std::string>() +
                              "' (expected located_at, modify, suggestive_of)");
      }
      triple.relation = rel->get<std::string>();
      doc.relations.push_back(std::move(triple));
    }
  }
  return doc;
}

}  // namespace

bool is_known_relation(std::string_view relation) {
  return std::find(kRelationSchema.begin(), kRelationSchema.end(), relation) !=
         kRelationSchema.end();
}

std::string normalize_span(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool pending_space = false;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out.push_back(' ');
      pending_space = false;
    }
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn) {
  Prf prf;
  prf.tp = tp;
  prf.fp = fp;
  prf.fn = fn;
  prf.no_predictions = tp + fp == 0;
  if (tp + fp > 0) {
    prf.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  }
  if (tp + fn > 0) {
    prf.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  }
  if (prf.precision + prf.recall > 0.0) {
    prf.f1 = 2.0 * prf.precision * prf.recall / (prf.precision + prf.recall);
  }
  return prf;
}

int label_from_factscore(int score, int pass_threshold) {
  if (score < 0 || score > 3) {
    throw ValidationError("fact_score out of range (expected 0..3)");
  }
  return score >= pass_threshold ? 1 : 0;
}

ResolveResult resolve_labels(const Dataset& input, int pass_threshold) {
  ResolveResult result;
  result.dataset.provenance = input.provenance;
  result.dataset.records.reserve(input.records.size());
  for (const auto& record : input.records) {
    ExtractionRecord resolved = record;
    if (!resolved.label.has_value()) {
      if (record.fact_score.has_value()) {
        resolved.label = label_from_factscore(*record.fact_score, pass_threshold);
      } else if (record.gold_match.has_value()) {
        resolved.label = *record.gold_match ? 1 : 0;
      } else {
        if (result.n_unresolved == 0) {
          result.first_unresolved_id = record.record_id;
        }
        ++result.n_unresolved;
        continue;
      }
    }
    result.dataset.records.push_back(std::move(resolved));
  }
  return result;
}

Prf match_entity_sets(const EntitiesByDoc& predicted,
                      const EntitiesByDoc& gold) {
  return match_sets(predicted, gold, entity_key);
}

Prf match_relation_sets(const RelationsByDoc& predicted,
                        const RelationsByDoc& gold) {
  return match_sets(predicted, gold, relation_key);
}

RelationsByDoc relations_by_doc(const GoldCorpus& corpus) {
  RelationsByDoc by_doc;
  for (const auto& doc : corpus) {
    if (!doc.relations.empty()) {
      auto& slot = by_doc[doc.doc_id];
      slot.insert(slot.end(), doc.relations.begin(), doc.relations.end());
    }
  }
  return by_doc;
}

MatchReport match_against_gold(const Dataset& predictions,
                               const GoldCorpus& gold,
                               const RelationsByDoc& predicted_relations) {
  std::map<std::string, const GoldDoc*> gold_by_id;
  for (const auto& doc : gold) {
    gold_by_id.emplace(doc.doc_id, &doc);
  }

  // Record indices per document, in input order, so consumption order and
  // the emitted labels follow the prediction file.
  std::map<std::string, std::vector<std::size_t>> doc_indices;
  for (std::size_t i = 0; i < predictions.records.size(); ++i) {
    doc_indices[predictions.records[i].doc_id].push_back(i);
  }

  MatchReport report;
  report.labeled = predictions;

  Counts entity_counts;
  static const std::vector<EntityMention> kNoGold;
  for (const auto& [doc_id, indices] : doc_indices) {
    std::vector<EntityMention> mentions;
    mentions.reserve(indices.size());
    for (std::size_t i : indices) {
      const auto& record = predictions.records[i];
      mentions.push_back({record.span_text, record.category});
    }
    const GoldDoc* gold_doc = nullptr;
    if (auto it = gold_by_id.find(doc_id); it != gold_by_id.end()) {
      gold_doc = it->second;
    } else {
      report.warnings.push_back("doc " + doc_id +
                                " absent from gold; all " +
                                std::to_string(indices.size()) +
                                " predictions counted as false positives");
    }
    std::vector<char> consumed;
    entity_counts += match_doc(mentions,
                               gold_doc != nullptr ? gold_doc->entities : kNoGold,
                               entity_key, &consumed);
    for (std::size_t j = 0; j < indices.size(); ++j) {
      auto& record = report.labeled.records[indices[j]];
      record.gold_match = consumed[j] != 0;
      record.label = consumed[j] != 0 ? 1 : 0;
    }
  }
  // Gold documents with no predictions at all still contribute misses.
  for (const auto& doc : gold) {
    if (doc_indices.find(doc.doc_id) == doc_indices.end()) {
      entity_counts.fn += doc.entities.size();
    }
  }
  report.entities =
      prf_from_counts(entity_counts.tp, entity_counts.fp, entity_counts.fn);

  report.relations =
      match_relation_sets(predicted_relations, relations_by_doc(gold));
  return report;
}

GoldCorpus load_gold(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open " + path);
  }
  GoldCorpus corpus;
  std::set<std::string> seen_ids;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.find_first_not_of(" \t\r\n") == std::string::npos) {
      continue;
    }
    const std::string where = path + ":" + std::to_string(line_number) + ": ";
    try {
      GoldDoc doc = parse_gold_doc(line);
      if (!seen_ids.insert(doc.doc_id).second) {
        throw ValidationError("duplicate doc_id '" + doc.doc_id + "'");
      }
      corpus.push_back(std::move(doc));
    } catch (const ParseError& err) {
      throw ParseError(where + err.what());
    } catch (const ValidationError& err) {
      throw ValidationError(where + err.what());
    }
  }
  if (in.bad()) {
    throw IoError("read failure on " + path);
  }
  return corpus;
}

}  // namespace riskcal
