#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "droidcall/call_plan.hpp"
#include "droidcall/errors.hpp"
#include "droidcall/llm_backend.hpp"
#include "droidcall/prompt_formats.hpp"
#include "droidcall/record.hpp"
#include "droidcall/retriever.hpp"
#include "droidcall/schema.hpp"

namespace droidcall {

enum class EvalErrc { EmptyTestSet, UnknownFunction };

std::string_view to_string(EvalErrc kind);

class EvalError : public KindError<EvalErrc> {
 public:
  using KindError::KindError;
};

class SemanticScorer {
 public:
  explicit SemanticScorer(double threshold = 0.75) : threshold_(threshold) {}
  virtual ~SemanticScorer() = default;

  // Similarity in [0, 1]; identical texts score 1.
  virtual double similarity(std::string_view a, std::string_view b) const = 0;
  double threshold() const { return threshold_; }

 private:
  double threshold_;
};

// Cosine of hashed bag-of-words vectors (dimension 256).
class OverlapScorer : public SemanticScorer {
 public:
  using SemanticScorer::SemanticScorer;
  double similarity(std::string_view a, std::string_view b) const override;
};

// Runs `command` with {"a": ..., "b": ...} on stdin; stdout is a number in
// [0, 1]. Failures raise BackendError(BackendUnavailable).
class CommandScorer : public SemanticScorer {
 public:
  CommandScorer(std::string command, double threshold = 0.75)
      : SemanticScorer(threshold), command_(std::move(command)) {}
  double similarity(std::string_view a, std::string_view b) const override;

 private:
  std::string command_;
};

double semantic_similarity(std::string_view a, std::string_view b, const SemanticScorer& scorer);

using MatchModes = std::map<std::pair<std::string, std::string>, MatchMode>;

MatchMode mode_of(const MatchModes& modes, std::string_view function, std::string_view param);

// Exact: equal values (Refs compare by id). Semantic: both strings and
// similarity >= threshold; any other pairing falls back to exact.
bool param_match(const ArgValue& gold, const ArgValue& pred, MatchMode mode, const SemanticScorer& scorer);

struct CallScore {
  std::size_t gold_call_id = 0;
  std::optional<std::size_t> matched_pred_id;
  std::size_t p_correct = 0;
  std::size_t p_total = 0;
  double score = 0.0;
};

// Refs are compared by id.
CallScore score_call(const FunctionCall& gold, const std::optional<FunctionCall>& pred, const MatchModes& modes,
                     const SemanticScorer& scorer);

// Refs match when their targets match structurally (same function, same
// arguments, recursively).
CallScore score_call_in_plans(const CallPlan& gold_plan, std::size_t gold_id, const CallPlan& pred_plan,
                              std::optional<std::size_t> pred_id, const MatchModes& modes,
                              const SemanticScorer& scorer);

// assignment[gold id] = matched pred id. Maximum cardinality, then maximum
// total score, over name-equal pairs; ties go to the lowest (gold, pred) ids.
std::vector<std::optional<std::size_t>> align_calls(const CallPlan& gold, const CallPlan& pred,
                                                    const MatchModes& modes, const SemanticScorer& scorer);

struct SampleResult {
  bool exact = false;
  std::vector<CallScore> scores;  // one per gold call, in gold id order
  std::optional<std::string> parse_error;
};

SampleResult score_sample(const GenerationRecord& gold, const CallPlan& pred, const MatchModes& modes,
                          const SemanticScorer& scorer);

// Every gold call scores 0; used when the model output cannot be parsed.
SampleResult failed_sample(const GenerationRecord& gold, std::string reason);

struct EvalReport {
  std::size_t n_total = 0;
  std::size_t n_perfect = 0;
  double acc = 0.0;
  double acc_soft = 0.0;
  std::vector<CallScore> call_scores;
  std::vector<SampleResult> samples;
};

// Throws EvalError(EmptyTestSet) for no samples.
EvalReport aggregate(const std::vector<SampleResult>& samples);

ordered_json report_to_json(const EvalReport& report, const std::vector<GenerationRecord>& testset = {});

// Distinct schemas of the gold calls, in first-use order.
std::vector<FunctionSchema> fake_retrieve(const GenerationRecord& sample, const SchemaRegistry& registry);

class FunctionRetriever {
 public:
  virtual ~FunctionRetriever() = default;
  virtual std::vector<FunctionSchema> retrieve(const GenerationRecord& sample) const = 0;
};

class FakeRetriever : public FunctionRetriever {
 public:
  explicit FakeRetriever(const SchemaRegistry& registry) : registry_(registry) {}
  std::vector<FunctionSchema> retrieve(const GenerationRecord& sample) const override {
    return fake_retrieve(sample, registry_);
  }

 private:
  const SchemaRegistry& registry_;
};

// Top-k functions for the sample query from a vector index.
class VectorRetriever : public FunctionRetriever {
 public:
  VectorRetriever(const SchemaRegistry& registry, const Embedder& embedder, std::size_t k = kDefaultRetrieveK);
  std::vector<FunctionSchema> retrieve(const GenerationRecord& sample) const override;

 private:
  const SchemaRegistry& registry_;
  const Embedder& embedder_;
  VectorIndex index_;
  std::size_t k_;
};

struct EvalOptions {
  Separator separator;
  std::vector<FewshotExample> fewshot;
};

// Raised when the backend fails mid-run; carries the samples scored so far.
class EvalAborted : public Error {
 public:
  EvalAborted(std::string message, std::vector<SampleResult> partial)
      : Error(std::move(message)), partial_(std::move(partial)) {}
  const std::vector<SampleResult>& partial() const noexcept { return partial_; }

 private:
  std::vector<SampleResult> partial_;
};

EvalReport evaluate_model(const std::vector<GenerationRecord>& testset, LlmBackend& model, PromptFormat format,
                          const SemanticScorer& scorer, const FunctionRetriever& retriever,
                          const MatchModes& modes, const EvalOptions& options = {});

}  // namespace droidcall
