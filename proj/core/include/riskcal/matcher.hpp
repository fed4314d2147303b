#pragma once

// Verification-label resolution and entity/relation scoring against gold
// annotations. Matching is exact on (normalized span text, label) pairs,
// count-aware (duplicated predictions beyond the gold multiplicity are false
// positives), and micro-averaged across documents.

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "riskcal/record.hpp"

namespace riskcal {

struct EntityMention {
  std::string span_text;
  std::string label;
};

struct RelationTriple {
  EntityMention source;
  EntityMention target;
  std::string relation;  // one of kRelationSchema
};

inline constexpr std::array<std::string_view, 3> kRelationSchema = {
    "located_at", "modify", "suggestive_of"};

bool is_known_relation(std::string_view relation);

struct GoldDoc {
  std::string doc_id;
  std::vector<EntityMention> entities;
  std::vector<RelationTriple> relations;
};

using GoldCorpus = std::vector<GoldDoc>;

// Micro-averaged precision/recall/F1. no_predictions marks the degenerate
// empty-prediction case (precision has no defined denominator; all three
// metrics are reported as 0 and rendered "--").
struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  bool no_predictions = false;
};

Prf prf_from_counts(std::size_t tp, std::size_t fp, std::size_t fn);

// Canonical span form for comparison: surrounding whitespace trimmed,
// internal whitespace runs collapsed to one space, ASCII case folded.
std::string normalize_span(std::string_view text);

// Fact-score thresholding: 1 iff score >= pass_threshold. Scores live in
// 0..3; only the top score counts as correct under the default threshold.
int label_from_factscore(int score, int pass_threshold = 3);

// Fills in missing labels from verification evidence, preferring an explicit
// label over fact_score over gold_match. Records with no evidence at all are
// dropped and counted; the caller decides whether that is fatal.
struct ResolveResult {
  Dataset dataset;
  std::size_t n_unresolved = 0;
  std::string first_unresolved_id;
};

ResolveResult resolve_labels(const Dataset& input, int pass_threshold = 3);

using EntitiesByDoc = std::map<std::string, std::vector<EntityMention>>;
using RelationsByDoc = std::map<std::string, std::vector<RelationTriple>>;

// Per-document multiset matching: within a document, tp for a normalized
// (span, label) key is the minimum of predicted and gold multiplicities.
// Documents missing on either side contribute pure fp or fn.
Prf match_entity_sets(const EntitiesByDoc& predicted, const EntitiesByDoc& gold);

// A predicted triple matches iff some gold triple in the same document has
// the identical source pair, target pair, and relation type.
Prf match_relation_sets(const RelationsByDoc& predicted,
                        const RelationsByDoc& gold);

RelationsByDoc relations_by_doc(const GoldCorpus& corpus);

// Scores a prediction dataset against gold annotations and resolves each
// record's label: 1 iff the record was consumed by a match, with duplicates
// consuming gold multiplicity in input order. gold_match is set alongside
// label so the evidence survives serialization.
struct MatchReport {
  Dataset labeled;
  Prf entities;
  Prf relations;
  std::vector<std::string> warnings;
};

MatchReport match_against_gold(const Dataset& predictions,
                               const GoldCorpus& gold,
                               const RelationsByDoc& predicted_relations = {});

// Gold annotations as line-delimited JSON: {"doc_id": ..., "entities":
// [{"span_text","label"}, ...], "relations": [{"source": {...}, "target":
// {...}, "relation": ...}, ...]}. Both arrays are optional. Throws IoError
// on unreadable files, ParseError/ValidationError citing the line otherwise.
GoldCorpus load_gold(const std::string& path);

}  // namespace riskcal
