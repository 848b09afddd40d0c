#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "droidcall/record.hpp"
#include "droidcall/schema.hpp"

namespace droidcall {

// Maximal well-formed JSON objects/arrays found in free text, in textual
// order. A top-level array made only of objects is replaced by its elements.
std::vector<json> extract_json_values(std::string_view raw);

enum class RecordErrc {
  MissingKey,
  BadShape,
  UnknownFunction,
  UnknownArgument,
  MissingRequiredArgument,
  BadReference,
};

std::string_view to_string(RecordErrc kind);

struct RecordRejection {
  RecordErrc kind;
  std::string detail;
};

struct RecordCheck {
  std::optional<GenerationRecord> record;
  std::optional<RecordRejection> rejection;

  bool accepted() const { return record.has_value(); }
};

// Strict check of one generated value against the {query, answers[id, name,
// arguments]} layout and the registry. Never throws.
RecordCheck validate_record(const json& value, const SchemaRegistry& registry);

using TokenSeq = std::vector<std::string>;

// Lowercase, split on whitespace, strip leading/trailing punctuation from
// each token, drop tokens left empty.
TokenSeq tokenize_query(std::string_view text);

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b);

// ROUGE-L F1 between two token sequences.
double rouge_l_f(const TokenSeq& candidate, const TokenSeq& reference);

struct SimilarityState {
  std::vector<TokenSeq> accepted_queries;
  double threshold = 0.75;
};

enum class FilterDecision { Keep, Drop };

// Drops when the best score against any accepted query is >= threshold;
// otherwise records the query in `state`.
FilterDecision similarity_filter_step(const GenerationRecord& record, SimilarityState& state);

// Highest rouge_l_f of `tokens` against the accepted queries (0 when none).
double max_similarity(const TokenSeq& tokens, const SimilarityState& state);

enum class RejectReason { NotJson, BadFormat, Duplicate };

std::string_view to_string(RejectReason reason);

struct Rejection {
  RejectReason reason;
  std::string raw;
  std::string detail;
};

struct FilterOutcome {
  std::vector<GenerationRecord> accepted;
  std::vector<Rejection> rejected;
};

// extract_json_values -> validate_record -> similarity_filter_step. Output
// with no JSON value at all is reported as one NotJson rejection.
FilterOutcome run_filter_chain(std::string_view raw, const SchemaRegistry& registry,
                               SimilarityState& state);

// One {"reason", "raw", "detail"} object per line.
std::string rejections_to_jsonl(const std::vector<Rejection>& rejections);

}  // namespace droidcall
