#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "droidcall/call_plan.hpp"
#include "droidcall/errors.hpp"
#include "droidcall/record.hpp"
#include "droidcall/schema.hpp"

namespace droidcall {

enum class PromptFormat { Json, Code, JsonShort, CodeShort };

std::string_view to_string(PromptFormat format);
std::optional<PromptFormat> prompt_format_from_string(std::string_view name);
bool is_code(PromptFormat format);
bool is_short(PromptFormat format);

enum class FormatErrc { NoFunctions, UnknownFunction, EmptyField };

std::string_view to_string(FormatErrc kind);

class FormatError : public KindError<FormatErrc> {
 public:
  using KindError::KindError;
};

struct ChatSample {
  std::string system;
  std::string user;
  std::string assistant;

  friend bool operator==(const ChatSample&, const ChatSample&) = default;
};

ordered_json chat_sample_to_json(const ChatSample& sample);
ChatSample chat_sample_from_json(const json& j);

// Name/Description/Args/Returns/Example block for code variants, the schema
// JSON for json variants.
std::string render_function_doc(const FunctionSchema& schema, PromptFormat format);

struct FewshotExample {
  std::string query;
  CallPlan answers;
};

struct PromptText {
  std::string system;
  std::string user;
};

// Short variants ignore `fewshot`.
PromptText render_eval_prompt(PromptFormat format, const std::vector<FunctionSchema>& functions,
                              std::string_view query, const std::vector<FewshotExample>& fewshot = {},
                              const Separator& separator = {});

std::string render_answer(const CallPlan& plan, PromptFormat format, const Separator& separator = {});

// Inverse of render_answer. JSON answers surrounded by prose fall back to the
// first extracted array.
CallPlan parse_answer(std::string_view text, PromptFormat format, const Separator& separator = {});

// Distinct schemas named by the record's calls, in first-use order.
std::vector<FunctionSchema> record_functions(const GenerationRecord& record, const SchemaRegistry& registry);

ChatSample render_training_sample(const GenerationRecord& record, PromptFormat format,
                                  const SchemaRegistry& registry, const Separator& separator = {});

struct TokenizerHandle {
  std::string id;
  std::function<std::size_t(std::string_view)> count;
};

// Counts maximal runs of non-whitespace bytes.
TokenizerHandle whitespace_tokenizer();

// Runs `command` with the text on stdin; stdout must be a single integer.
TokenizerHandle command_tokenizer(const std::string& command);

struct TokenStats {
  double mean = 0.0;
  std::vector<std::size_t> per_sample;
};

// Counts system + "\n" + user of each record's evaluation prompt, built from
// the record's own functions.
TokenStats token_stats(const std::vector<GenerationRecord>& dataset, PromptFormat format,
                       const TokenizerHandle& tokenizer, const SchemaRegistry& registry);

struct FinetuneConfig {
  int lora_rank = 8;
  int lora_alpha = 16;
  double learning_rate = 1.41e-5;
  double warmup_ratio = 0.1;
  int epochs = 24;
  std::string scheduler = "linear";

  friend bool operator==(const FinetuneConfig&, const FinetuneConfig&) = default;
};

FinetuneConfig export_finetune_config();
ordered_json finetune_config_to_json(const FinetuneConfig& config);
FinetuneConfig finetune_config_from_json(const json& j);

}  // namespace droidcall
