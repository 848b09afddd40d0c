#include "droidcall/pipeline.hpp"

#include <algorithm>
#include <exception>
#include <random>
#include <thread>
#include <variant>

#include <spdlog/spdlog.h>

#include "droidcall/io.hpp"

namespace droidcall {

std::string_view to_string(PipelineErrc kind) {
  switch (kind) {
    case PipelineErrc::InsufficientRecords: return "InsufficientRecords";
    case PipelineErrc::ModeArityMismatch: return "ModeArityMismatch";
    case PipelineErrc::PreconditionViolation: return "PreconditionViolation";
    case PipelineErrc::NoSeeds: return "NoSeeds";
  }
  return "PipelineError";
}

std::string_view to_string(GenerationMode mode) {
  return mode == GenerationMode::Simple ? "simple" : "complex";
}

DataSource read_data_source(const std::filesystem::path& path) {
  DataSource src;
  src.id = path.filename().string();
  src.records = read_jsonl(path);
  for (std::size_t i = 0; i < src.records.size(); ++i) {
    if (!src.records[i].is_object())
      throw IoError(path.string() + ": row " + std::to_string(i + 1) + " is not a JSON object");
  }
  return src;
}

namespace {

// Unbiased draw in [0, bound) that does not depend on the standard library's
// distribution implementation.
std::uint64_t bounded(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

}  // namespace

std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t rng_seed) {
  if (k > n)
    throw PipelineError(PipelineErrc::InsufficientRecords,
                        "asked for " + std::to_string(k) + " of " + std::to_string(n) + " records");
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  std::mt19937_64 rng(rng_seed);
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + static_cast<std::size_t>(bounded(rng, n - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  return idx;
}

namespace {

constexpr std::string_view kIntro =
    "I need your help to generate some function calling datasets. I will provide you with a tool "
    "description, and you need to generate queries and corresponding answers based on this tool, i.e., the "
    "answers that call the tool to resolve the user's query. Here are my requirements:";

constexpr std::string_view kMainIntro =
    "I need your help to generate some function calling datasets. I will provide you with a tool "
    "description and some example data for you.\n"
    "You need to generate queries and corresponding answers based on this tool, i.e., the answers that call "
    "the tool to resolve the user's query. Here are my requirements:";

constexpr std::string_view kDiversity =
    "For queries, try to use different vocabulary and syntax to ensure query diversity. Queries can be long "
    "or short, complex or concise. In short, try not to generate similar queries; I want to ensure query "
    "diversity.";
constexpr std::string_view kLanguage =
    "The language of the queries should be as diverse as possible. This means a query can be a command, a "
    "question, or a request with detailed descriptions, etc.";
constexpr std::string_view kCoverage =
    "The generated queries should cover all possible uses of the tool as much as possible, meaning the "
    "coverage of various parameters should be comprehensive, ensuring the tool can be used to complete "
    "various forms of work.";
constexpr std::string_view kSolvable = "The generated queries should be solvable using the given tools.";
constexpr std::string_view kAnswers =
    "For the queries you generate, you should provide answers using the tool, i.e., give the tool used and "
    "the values for each parameter.";
constexpr std::string_view kOptionalMay =
    "When providing parameters, if a parameter has required=False, you may omit its value.";
constexpr std::string_view kOptionalNeed =
    "When providing parameters, if a parameter has required=False, it is not necessary to provide its value.";
constexpr std::string_view kPairsCover = "The query-answer pairs should cover as many possible uses of the tool as possible.";
constexpr std::string_view kFormat = "The generated data must be presented in the format given in my example.";
constexpr std::string_view kNoFabricate =
    "The parameter values generated with function call generated must be values that can be inferred from "
    "the user's query; YOU CANNOT FABRICATE PARAMETERS THAT CANNOT BE OBTAINED FROM THE USER'S REQUEST.";
constexpr std::string_view kNoFabricateUpper =
    "THE PARAMETER VALUES GENERATED WITH FUNCTION CALL GENERATED MUST BE VALUES THAT CAN BE INFERRED FROM "
    "THE USER'S QUERY; YOU CANNOT FABRICATE PARAMETERS THAT CANNOT BE OBTAINED FROM THE USER'S REQUEST.";
constexpr std::string_view kEnoughInfo =
    "THE GENERATED QUERY SHOULD CONTAIN ENOUGH INFOMATION SO THAT YOU COULD CORRECTLY GENERATE PARAMETER "
    "USED BY THE TOOLS. THIS IS ALSO TO GUARANTEE THAT YOU DON'T FABRICATE PARAMETERS.";
constexpr std::string_view kAllTools =
    "You should use all the tools I provided to generate the query and answer. It means that you should "
    "generate a query that needs to use all the tools I provided to solve, and remember to provider an "
    "answer that uses all the tools to solve the query.";
constexpr std::string_view kSameTool =
    "You can use the same tool multiple times in a single query to ensure the query diversity.";
constexpr std::string_view kIds =
    "Attach each answer with an id starting from 0. And if a tool should use the respone from another tool, "
    "you can reference it using #id, where id is the id of the tool.";
constexpr std::string_view kNested =
    "Generate data of nested function calls if possible. i.e., the argument of a function call is the "
    "response of another function call.";

constexpr std::string_view kRememberJson = "REMEMBER TO GENERATE THE RESULT IN JSON FORMAT LIKE THE EXAMPLE ABOVE";
constexpr std::string_view kRememberJsonList =
    "REMEMBER TO GENERATE THE RESULT IN JSON FORMAT LIKE THE EXAMPLE ABOVE AND PUT IT IN A JSON LIST.";
constexpr std::string_view kRememberAllTools =
    "REMEMBER YOU SHOULD USE ALL THE TOOLS AT ONE QUERY AND SOLVE IT WITH ALL TOOLS, AND GENERATE NESTED CALL "
    "IF POSSIBLE.";
constexpr std::string_view kRememberNoFabricate =
    "REMEMBER NOT TO FABRICATE PARAMETERS FOR TOOLS. PARAMETERS SHOULD BE INFERED FROM USER QUERY.";

std::string numbered(std::initializer_list<std::string_view> items) {
  std::string out;
  std::size_t i = 0;
  for (auto item : items) {
    if (i) out += "\n";
    out += std::to_string(++i) + ". " + std::string(item);
  }
  return out;
}

std::string complex_requirements() {
  return numbered({kDiversity, kLanguage, kCoverage, kSolvable, kAnswers, kOptionalMay, kFormat,
                   kNoFabricateUpper, kEnoughInfo, kAllTools, kSameTool, kIds, kNested});
}

std::string checked_tool_json(const FunctionSchema& schema) {
  try {
    schema.validate();
  } catch (const Error& e) {
    throw PipelineError(PipelineErrc::PreconditionViolation, e.what());
  }
  return serialize_schema(schema, 4);
}

std::string tools_block(const std::vector<FunctionSchema>& schemas) {
  std::string out;
  for (const auto& s : schemas) {
    if (!out.empty()) out += "\n";
    out += checked_tool_json(s);
  }
  return out;
}

// An external row renders as "tool: ...\nresponse: {query, answers}" when it
// carries its own tool list, and as the bare row otherwise.
std::string external_example(const json& row) {
  if (row.is_object() && row.contains("tools") && row.contains("query") && row.contains("answers")) {
    ordered_json response;
    response["query"] = row.at("query");
    response["answers"] = row.at("answers");
    const json& tools = row.at("tools");
    std::string tool_text = tools.is_string() ? tools.get<std::string>() : tools.dump(4);
    return "tool: " + tool_text + "\nresponse: " + response.dump(4);
  }
  return "response: " + row.dump(4);
}

std::string external_examples(const std::vector<json>& rows) {
  if (rows.empty()) throw PipelineError(PipelineErrc::PreconditionViolation, "seed prompts need at least one example");
  std::string out;
  for (const auto& r : rows) {
    if (!out.empty()) out += "\n";
    out += external_example(r);
  }
  return out;
}

std::string seed_examples_block(const std::vector<GenerationRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    if (!out.empty()) out += "\n";
    out += record_to_json(r).dump(4);
  }
  return out;
}

}  // namespace

std::string render_seed_prompt(const FunctionSchema& schema, const std::vector<json>& external,
                               std::size_t batch_size) {
  std::string tool = checked_tool_json(schema);
  std::string examples = external_examples(external);
  return std::string(kIntro) + "\n\n" +
         numbered({kDiversity, kLanguage, kCoverage, kSolvable, kAnswers, kOptionalMay, kFormat, kNoFabricate, kIds}) +
         "\n\nfollowing are some examples:\n" + examples +
         "\n\nNow I will give you a tool, and you help me generate " + std::to_string(batch_size) +
         " query-answer pairs.\n" + std::string(kRememberJson) + "\n" + std::string(kRememberNoFabricate) +
         "\ntool: " + tool;
}

std::string render_complex_seed_prompt(const std::vector<FunctionSchema>& schemas, const std::vector<json>& external,
                                       std::size_t batch_size) {
  if (schemas.size() < 2 || schemas.size() > 3)
    throw PipelineError(PipelineErrc::ModeArityMismatch, "complex prompts take 2 or 3 functions");
  std::string tools = tools_block(schemas);
  std::string examples = external_examples(external);
  return std::string(kIntro) + "\n\n" + complex_requirements() + "\n\nfollowing are some examples:\n" + examples +
         "\n\nNow I will give you a tool, and you help me generate " + std::to_string(batch_size) +
         " query-answer pairs.\n" + std::string(kRememberJsonList) + "\n" + std::string(kRememberAllTools) + "\n" +
         std::string(kRememberNoFabricate) + "\ntools:\n" + tools;
}

std::string render_main_prompt(const std::vector<FunctionSchema>& schemas,
                               const std::vector<GenerationRecord>& seed_examples, GenerationMode mode,
                               std::size_t batch_size) {
  if (mode == GenerationMode::Simple && schemas.size() != 1)
    throw PipelineError(PipelineErrc::ModeArityMismatch,
                        "simple mode takes exactly 1 function, got " + std::to_string(schemas.size()));
  if (mode == GenerationMode::Complex && (schemas.size() < 2 || schemas.size() > 3))
    throw PipelineError(PipelineErrc::ModeArityMismatch,
                        "complex mode takes 2 or 3 functions, got " + std::to_string(schemas.size()));
  if (seed_examples.empty())
    throw PipelineError(PipelineErrc::PreconditionViolation, "main prompts need at least one seed example");
  std::string examples = seed_examples_block(seed_examples);
  std::string count = std::to_string(batch_size);
  if (mode == GenerationMode::Simple) {
    return std::string(kMainIntro) + "\n\n" +
           numbered({kDiversity, kLanguage, kCoverage, kSolvable, kAnswers, kOptionalNeed, kPairsCover, kFormat,
                     kNoFabricate}) +
           "\n\nfollowing are tool I provided and some examples of query-answer pairs:\ntool: " +
           checked_tool_json(schemas.front()) + "\nexamples: " + examples + "\n\nNow please help me generate " +
           count + " query-answer pairs.\n" + std::string(kRememberJson) + "\n" + std::string(kRememberNoFabricate);
  }
  return std::string(kIntro) + "\n\n" + complex_requirements() +
         "\n\nNow I will give you some tools and some example data of query-answer pairs using these tools.\n"
         "Please help me generate " +
         count + " query-answer pairs.\ntools: " + tools_block(schemas) + "\nexamples: " + examples + "\n\n" +
         std::string(kRememberJsonList) + "\n" + std::string(kRememberAllTools) + "\n" +
         std::string(kRememberNoFabricate);
}

std::string pool_key(const std::vector<std::string>& functions) {
  std::vector<std::string> sorted = functions;
  std::sort(sorted.begin(), sorted.end());
  std::string out;
  for (const auto& f : sorted) {
    if (!out.empty()) out += "+";
    out += f;
  }
  return out;
}

namespace {

struct PreparedJob {
  std::string key;
  std::vector<std::string> functions;
  std::string prompt;
};

using Completion = std::variant<std::string, std::exception_ptr>;

// Completes prompts in windows of `concurrency`; `prepare` runs for every job
// of a window before its completions start, `commit` runs in submission order
// after the window finishes. The first backend failure is rethrown after the
// jobs ahead of it have been committed.
template <typename Prepare, typename Commit>
void run_windows(std::size_t job_count, std::size_t concurrency, LlmBackend& llm, Prepare prepare, Commit commit) {
  const std::size_t width = std::max<std::size_t>(1, concurrency);
  for (std::size_t start = 0; start < job_count; start += width) {
    const std::size_t end = std::min(job_count, start + width);
    std::vector<PreparedJob> jobs;
    for (std::size_t i = start; i < end; ++i) jobs.push_back(prepare(i));
    std::vector<Completion> results(jobs.size());
    auto work = [&](std::size_t j) {
      try {
        results[j] = llm.complete(ChatPrompt{"", jobs[j].prompt});
      } catch (...) {
        results[j] = std::current_exception();
      }
    };
    if (jobs.size() == 1) {
      work(0);
    } else {
      std::vector<std::thread> threads;
      for (std::size_t j = 0; j < jobs.size(); ++j) threads.emplace_back(work, j);
      for (auto& t : threads) t.join();
    }
    for (std::size_t j = 0; j < jobs.size(); ++j) {
      if (auto* err = std::get_if<std::exception_ptr>(&results[j])) std::rethrow_exception(*err);
      commit(jobs[j], std::get<std::string>(results[j]));
    }
  }
}

std::vector<FunctionSchema> schemas_for(const SchemaRegistry& registry, const std::vector<std::string>& names) {
  std::vector<FunctionSchema> out;
  for (const auto& n : names) {
    const FunctionSchema* s = registry.find(n);
    if (!s) throw PipelineError(PipelineErrc::PreconditionViolation, "function '" + n + "' is not registered");
    out.push_back(*s);
  }
  return out;
}

// Per-job sampling seed derived from the run seed and the job's position.
std::uint64_t job_seed(std::uint64_t rng_seed, std::uint64_t stage_tag, std::size_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(rng_seed), static_cast<std::uint32_t>(rng_seed >> 32),
                    static_cast<std::uint32_t>(stage_tag), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(static_cast<std::uint64_t>(index) >> 32)};
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

void commit_output(const SchemaRegistry& registry, const PreparedJob& job, const std::string& raw,
                   SimilarityState& state, StageResult& result, std::vector<GenerationRecord>& pool) {
  SchemaRegistry scope = registry.subset(job.functions);
  FilterOutcome outcome = run_filter_chain(raw, scope, state);
  if (outcome.accepted.empty()) {
    spdlog::warn("batch for {} produced no accepted records ({} rejected)", job.key, outcome.rejected.size());
  } else {
    spdlog::info("batch for {}: {} accepted, {} rejected", job.key, outcome.accepted.size(), outcome.rejected.size());
  }
  for (auto& r : outcome.accepted) {
    pool.push_back(r);
    result.records.push_back(std::move(r));
  }
  for (auto& r : outcome.rejected) result.rejections.push_back(std::move(r));
}

}  // namespace

SeedStageResult run_seed_stage(const SchemaRegistry& registry, const DataSource& external, LlmBackend& llm,
                               SimilarityState& state, std::size_t per_function_batches,
                               const PipelineOptions& options,
                               const std::vector<std::vector<std::string>>& complex_sets) {
  SeedStageResult result;
  if (registry.empty()) return result;
  if (external.records.empty())
    throw PipelineError(PipelineErrc::PreconditionViolation, "the external corpus is empty");

  std::vector<std::vector<std::string>> job_functions;
  for (std::size_t b = 0; b < per_function_batches; ++b) {
    for (const auto& name : registry.names()) job_functions.push_back({name});
  }
  for (std::size_t b = 0; b < per_function_batches; ++b) {
    for (const auto& set : complex_sets) job_functions.push_back(set);
  }
  const std::size_t k = std::min(options.examples_per_prompt, external.records.size());

  run_windows(
      job_functions.size(), options.concurrency, llm,
      [&](std::size_t i) {
        const auto& names = job_functions[i];
        auto schemas = schemas_for(registry, names);
        auto examples = sample(external.records, k, job_seed(options.rng_seed, 1, i));
        std::string prompt = names.size() == 1
                                 ? render_seed_prompt(schemas.front(), examples, options.seed_batch_size)
                                 : render_complex_seed_prompt(schemas, examples, options.seed_batch_size);
        return PreparedJob{pool_key(names), names, std::move(prompt)};
      },
      [&](const PreparedJob& job, const std::string& raw) {
        commit_output(registry, job, raw, state, result, result.pools[job.key]);
      });
  return result;
}

StageResult run_main_stage(const SchemaRegistry& registry, SeedPools& seeds, LlmBackend& llm,
                           SimilarityState& state, const std::vector<GenerationJob>& schedule,
                           const PipelineOptions& options) {
  for (const auto& job : schedule) {
    if (job.stage != GenerationStage::Main)
      throw PipelineError(PipelineErrc::PreconditionViolation, "main-stage schedules take main jobs only");
    std::size_t n = job.functions.size();
    if ((job.mode == GenerationMode::Simple && n != 1) || (job.mode == GenerationMode::Complex && (n < 2 || n > 3)))
      throw PipelineError(PipelineErrc::ModeArityMismatch,
                          std::string(to_string(job.mode)) + " job with " + std::to_string(n) + " functions");
    schemas_for(registry, job.functions);
    auto it = seeds.find(pool_key(job.functions));
    if (it == seeds.end() || it->second.empty())
      throw PipelineError(PipelineErrc::NoSeeds, "no seed records for " + pool_key(job.functions));
  }

  StageResult result;
  run_windows(
      schedule.size(), options.concurrency, llm,
      [&](std::size_t i) {
        const auto& job = schedule[i];
        std::string key = pool_key(job.functions);
        const auto& pool = seeds.at(key);
        auto examples = sample(pool, std::min(job.example_count, pool.size()), job_seed(options.rng_seed, 2, i));
        std::string prompt =
            render_main_prompt(schemas_for(registry, job.functions), examples, job.mode, options.main_batch_size);
        return PreparedJob{key, job.functions, std::move(prompt)};
      },
      [&](const PreparedJob& job, const std::string& raw) {
        commit_output(registry, job, raw, state, result, seeds[job.key]);
      });
  return result;
}

std::vector<GenerationJob> default_schedule(const SchemaRegistry& registry,
                                            const std::vector<std::vector<std::string>>& complex_sets,
                                            std::size_t simple_rounds, std::size_t complex_rounds,
                                            std::size_t example_count) {
  std::vector<GenerationJob> out;
  for (std::size_t r = 0; r < simple_rounds; ++r) {
    for (const auto& name : registry.names())
      out.push_back({GenerationStage::Main, GenerationMode::Simple, {name}, example_count});
  }
  for (std::size_t r = 0; r < complex_rounds; ++r) {
    for (const auto& set : complex_sets)
      out.push_back({GenerationStage::Main, GenerationMode::Complex, set, example_count});
  }
  return out;
}

std::pair<std::vector<GenerationRecord>, std::vector<GenerationRecord>> split_dataset(
    const std::vector<GenerationRecord>& records, std::size_t train_n, std::size_t test_n, std::uint64_t rng_seed) {
  if (train_n + test_n > records.size())
    throw PipelineError(PipelineErrc::InsufficientRecords,
                        "split of " + std::to_string(train_n) + "+" + std::to_string(test_n) + " from " +
                            std::to_string(records.size()) + " records");
  auto idx = sample_indices(records.size(), train_n + test_n, rng_seed);
  std::pair<std::vector<GenerationRecord>, std::vector<GenerationRecord>> out;
  for (std::size_t i = 0; i < idx.size(); ++i) (i < train_n ? out.first : out.second).push_back(records[idx[i]]);
  return out;
}

}  // namespace droidcall
