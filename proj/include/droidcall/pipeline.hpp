#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "droidcall/errors.hpp"
#include "droidcall/filters.hpp"
#include "droidcall/llm_backend.hpp"
#include "droidcall/record.hpp"
#include "droidcall/schema.hpp"

namespace droidcall {

enum class PipelineErrc { InsufficientRecords, ModeArityMismatch, PreconditionViolation, NoSeeds };

std::string_view to_string(PipelineErrc kind);

class PipelineError : public KindError<PipelineErrc> {
 public:
  using KindError::KindError;
};

// An external corpus: one JSON object per row, usually {query, answers}.
struct DataSource {
  std::string id;
  std::vector<json> records;
};

DataSource read_data_source(const std::filesystem::path& path);

// k distinct indices into [0, n), uniform without replacement, in draw order.
std::vector<std::size_t> sample_indices(std::size_t n, std::size_t k, std::uint64_t rng_seed);

template <typename T>
std::vector<T> sample(const std::vector<T>& items, std::size_t k, std::uint64_t rng_seed) {
  std::vector<T> out;
  for (std::size_t i : sample_indices(items.size(), k, rng_seed)) out.push_back(items[i]);
  return out;
}

inline constexpr std::size_t kSeedBatchSize = 15;
inline constexpr std::size_t kMainBatchSize = 40;

std::string render_seed_prompt(const FunctionSchema& schema, const std::vector<json>& external_examples,
                               std::size_t batch_size = kSeedBatchSize);
std::string render_complex_seed_prompt(const std::vector<FunctionSchema>& schemas,
                                       const std::vector<json>& external_examples,
                                       std::size_t batch_size = kSeedBatchSize);

enum class GenerationMode { Simple, Complex };
enum class GenerationStage { Seed, Main };

std::string_view to_string(GenerationMode mode);

std::string render_main_prompt(const std::vector<FunctionSchema>& schemas,
                               const std::vector<GenerationRecord>& seed_examples, GenerationMode mode,
                               std::size_t batch_size = kMainBatchSize);

struct GenerationJob {
  GenerationStage stage = GenerationStage::Main;
  GenerationMode mode = GenerationMode::Simple;
  std::vector<std::string> functions;  // 1 for simple, 2-3 for complex
  std::size_t example_count = 3;
};

// Seed-pool key: the function name, or the sorted names joined with '+'.
std::string pool_key(const std::vector<std::string>& functions);

using SeedPools = std::map<std::string, std::vector<GenerationRecord>>;

struct PipelineOptions {
  std::size_t seed_batch_size = kSeedBatchSize;
  std::size_t main_batch_size = kMainBatchSize;
  std::size_t examples_per_prompt = 3;
  std::size_t concurrency = 1;  // in-flight completions
  std::uint64_t rng_seed = 0;
};

struct StageResult {
  std::vector<GenerationRecord> records;  // accepted, in commit order
  std::vector<Rejection> rejections;
};

struct SeedStageResult : StageResult {
  SeedPools pools;
};

// One seed job per function per batch, then one per complex set per batch.
SeedStageResult run_seed_stage(const SchemaRegistry& registry, const DataSource& external, LlmBackend& llm,
                               SimilarityState& state, std::size_t per_function_batches,
                               const PipelineOptions& options = {},
                               const std::vector<std::vector<std::string>>& complex_sets = {});

// Accepted records are appended to the output and to the job's seed pool.
StageResult run_main_stage(const SchemaRegistry& registry, SeedPools& seeds, LlmBackend& llm,
                           SimilarityState& state, const std::vector<GenerationJob>& schedule,
                           const PipelineOptions& options = {});

// `simple_rounds` jobs per function followed by `complex_rounds` jobs per set.
std::vector<GenerationJob> default_schedule(const SchemaRegistry& registry,
                                            const std::vector<std::vector<std::string>>& complex_sets,
                                            std::size_t simple_rounds, std::size_t complex_rounds,
                                            std::size_t example_count = 3);

std::pair<std::vector<GenerationRecord>, std::vector<GenerationRecord>> split_dataset(
    const std::vector<GenerationRecord>& records, std::size_t train_n, std::size_t test_n,
    std::uint64_t rng_seed);

}  // namespace droidcall
