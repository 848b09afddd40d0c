#include "cli.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <ostream>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include "CLI11.hpp"
#include "droidcall/device_state.hpp"
#include "droidcall/dispatch.hpp"
#include "droidcall/evaluation.hpp"
#include "droidcall/filters.hpp"
#include "droidcall/io.hpp"
#include "droidcall/llm_backend.hpp"
#include "droidcall/pipeline.hpp"
#include "droidcall/prompt_formats.hpp"
#include "droidcall/retriever.hpp"

namespace droidcall::cli {

namespace {

namespace fs = std::filesystem;

class ConfigError : public Error {
 public:
  using Error::Error;
};

struct GenerateSettings {
  std::optional<std::string> corpus;
  std::optional<std::string> out;
  std::optional<std::string> rejections;
  std::size_t seed_batches = 1;
  std::size_t seed_batch_size = kSeedBatchSize;
  std::size_t main_batch_size = kMainBatchSize;
  std::size_t examples_per_prompt = 3;
  std::size_t simple_rounds = 1;
  std::size_t complex_rounds = 1;
  std::vector<std::vector<std::string>> complex_sets;
  std::optional<std::string> train_out;
  std::optional<std::string> test_out;
  std::size_t train_n = 0;
  std::size_t test_n = 0;
};

struct EvaluateSettings {
  std::optional<std::string> report;
  std::string retriever = "fake";
  std::size_t k = kDefaultRetrieveK;
  std::optional<double> acc_floor;
  std::optional<std::string> scorer_command;
};

struct RunConfig {
  std::uint64_t rng_seed = 0;
  PromptFormat format = PromptFormat::Json;
  LlmBackendConfig backend;
  std::size_t jobs = 1;
  double dedup_threshold = 0.75;
  double semantic_threshold = 0.75;
  Separator separator;
  std::optional<std::string> functions_dir;
  GenerateSettings generate;
  EvaluateSettings evaluate;
  std::string tokenizer = "whitespace";
  std::size_t retrieve_k = kDefaultRetrieveK;
  std::optional<std::string> embedder_command;
  std::size_t embedder_dim = kEmbeddingDim;
};

// Strict object reader: every key must be handled.
class Section {
 public:
  Section(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + " must be an object");
  }

  template <typename Fn>
  Section& on(const char* key, Fn fn) {
    seen_.insert(key);
    if (j_.contains(key)) {
      try {
        fn(j_.at(key));
      } catch (const json::exception&) {
        throw ConfigError(where_ + "." + key + " has the wrong type");
      }
    }
    return *this;
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it) {
      if (!seen_.count(it.key())) throw ConfigError("unknown key " + where_ + "." + it.key());
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

template <typename T>
auto into(T& target) {
  return [&target](const json& v) { target = v.get<T>(); };
}

template <typename T>
auto into_opt(std::optional<T>& target) {
  return [&target](const json& v) { target = v.get<T>(); };
}

double unit_interval(double v, const char* name) {
  if (!(v >= 0.0 && v <= 1.0)) throw ConfigError(std::string(name) + " must be in [0, 1]");
  return v;
}

PromptFormat parse_format(const std::string& name) {
  auto f = prompt_format_from_string(name);
  if (!f) throw ConfigError("unknown format '" + name + "'");
  return *f;
}

LlmBackendConfig::Kind parse_backend_kind(const std::string& name) {
  if (name == "mock") return LlmBackendConfig::Kind::Mock;
  if (name == "http") return LlmBackendConfig::Kind::Http;
  throw ConfigError("unknown backend '" + name + "'");
}

void load_config(const fs::path& path, RunConfig& c) {
  json j = json::parse(read_text_file(path), nullptr, false);
  if (j.is_discarded()) throw ConfigError(path.string() + " is not valid JSON");
  Section root(j, "config");
  root.on("rng_seed", into(c.rng_seed))
      .on("format", [&](const json& v) { c.format = parse_format(v.get<std::string>()); })
      .on("jobs", into(c.jobs))
      .on("dedup_threshold", [&](const json& v) { c.dedup_threshold = unit_interval(v.get<double>(), "dedup_threshold"); })
      .on("semantic_threshold",
          [&](const json& v) { c.semantic_threshold = unit_interval(v.get<double>(), "semantic_threshold"); })
      .on("functions_dir", into_opt(c.functions_dir))
      .on("separator",
          [&](const json& v) {
            Section s(v, "separator");
            s.on("open", into(c.separator.open)).on("close", into(c.separator.close)).finish();
          })
      .on("backend",
          [&](const json& v) {
            Section s(v, "backend");
            s.on("kind", [&](const json& k) { c.backend.backend = parse_backend_kind(k.get<std::string>()); })
                .on("endpoint", into_opt(c.backend.endpoint))
                .on("model", into(c.backend.model_name))
                .on("temperature", into(c.backend.temperature))
                .on("max_retries", into(c.backend.max_retries))
                .on("timeout_seconds", into(c.backend.timeout_seconds))
                .on("script", into_opt(c.backend.script_path))
                .finish();
          })
      .on("generate",
          [&](const json& v) {
            auto& g = c.generate;
            Section s(v, "generate");
            s.on("corpus", into_opt(g.corpus))
                .on("out", into_opt(g.out))
                .on("rejections", into_opt(g.rejections))
                .on("seed_batches", into(g.seed_batches))
                .on("seed_batch_size", into(g.seed_batch_size))
                .on("main_batch_size", into(g.main_batch_size))
                .on("examples_per_prompt", into(g.examples_per_prompt))
                .on("simple_rounds", into(g.simple_rounds))
                .on("complex_rounds", into(g.complex_rounds))
                .on("complex_sets", into(g.complex_sets))
                .on("train_out", into_opt(g.train_out))
                .on("test_out", into_opt(g.test_out))
                .on("train_n", into(g.train_n))
                .on("test_n", into(g.test_n))
                .finish();
          })
      .on("evaluate",
          [&](const json& v) {
            auto& e = c.evaluate;
            Section s(v, "evaluate");
            s.on("report", into_opt(e.report))
                .on("retriever", into(e.retriever))
                .on("k", into(e.k))
                .on("acc_floor", [&](const json& x) { e.acc_floor = unit_interval(x.get<double>(), "acc_floor"); })
                .on("scorer_command", into_opt(e.scorer_command))
                .finish();
          })
      .on("stats",
          [&](const json& v) {
            Section s(v, "stats");
            s.on("tokenizer", into(c.tokenizer)).finish();
          })
      .on("retrieve",
          [&](const json& v) {
            Section s(v, "retrieve");
            s.on("k", into(c.retrieve_k))
                .on("embedder_command", into_opt(c.embedder_command))
                .on("embedder_dim", into(c.embedder_dim))
                .finish();
          })
      .finish();
  if (c.jobs == 0) throw ConfigError("jobs must be at least 1");
  for (const auto& set : c.generate.complex_sets) {
    if (set.size() < 2 || set.size() > 3) throw ConfigError("each complex set must name 2 or 3 functions");
  }
  if (c.evaluate.retriever != "fake" && c.evaluate.retriever != "vector")
    throw ConfigError("evaluate.retriever must be \"fake\" or \"vector\"");
}

SchemaRegistry load_registry(const RunConfig& c) {
  return c.functions_dir ? load_registry_dir(*c.functions_dir) : load_default_registry();
}

std::string require(const std::optional<std::string>& v, const char* what) {
  if (!v || v->empty()) throw ConfigError(std::string("missing ") + what);
  return *v;
}

std::shared_ptr<spdlog::logger> cli_logger() {
  static auto logger = [] {
    auto l = spdlog::get("droidcall-cli");
    return l ? l : spdlog::stderr_color_mt("droidcall-cli");
  }();
  return logger;
}

// --- commands -------------------------------------------------------------

int cmd_extract(const std::string& src_dir, const std::string& out_dir, std::ostream& out) {
  if (!fs::is_directory(src_dir)) throw IoError(src_dir + " is not a directory");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(src_dir)) {
    if (e.path().extension() == ".src") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  SchemaRegistry seen;
  std::vector<FunctionSchema> schemas;
  for (const auto& f : files) {
    try {
      schemas.push_back(parse_function_source(read_text_file(f)));
    } catch (const SchemaError& e) {
      throw SchemaError(e.kind(), f.string() + ": " + e.what());
    }
    seen.add(schemas.back());
  }
  fs::create_directories(out_dir);
  for (const auto& s : schemas) write_file_atomic(fs::path(out_dir) / (s.name + ".json"), serialize_schema(s) + "\n");
  out << "extracted " << schemas.size() << " schemas to " << out_dir << "\n";
  return kOk;
}

int cmd_generate(const RunConfig& c, std::ostream& out) {
  const auto& g = c.generate;
  auto registry = load_registry(c);
  auto corpus = read_data_source(require(g.corpus, "generate corpus (--corpus)"));
  std::string out_path = require(g.out, "generate output (--out)");
  std::string rejections_path = g.rejections.value_or(out_path + ".rejections.jsonl");
  for (const auto& set : g.complex_sets) {
    for (const auto& name : set) {
      if (!registry.contains(name)) throw ConfigError("complex set names unknown function " + name);
    }
  }

  auto backend = make_backend(c.backend);
  SimilarityState state;
  state.threshold = c.dedup_threshold;
  PipelineOptions options;
  options.seed_batch_size = g.seed_batch_size;
  options.main_batch_size = g.main_batch_size;
  options.examples_per_prompt = g.examples_per_prompt;
  options.concurrency = c.jobs;
  options.rng_seed = c.rng_seed;

  auto seeds = run_seed_stage(registry, corpus, *backend, state, g.seed_batches, options, g.complex_sets);
  std::vector<GenerationJob> schedule;
  for (const auto& job : default_schedule(registry, g.complex_sets, g.simple_rounds, g.complex_rounds,
                                          g.examples_per_prompt)) {
    auto it = seeds.pools.find(pool_key(job.functions));
    if (it == seeds.pools.end() || it->second.empty()) {
      cli_logger()->warn("no seeds for {}; skipping its main-stage job", pool_key(job.functions));
      continue;
    }
    schedule.push_back(job);
  }
  auto main = run_main_stage(registry, seeds.pools, *backend, state, schedule, options);

  std::vector<GenerationRecord> dataset = seeds.records;
  dataset.insert(dataset.end(), main.records.begin(), main.records.end());
  std::vector<Rejection> rejections = seeds.rejections;
  rejections.insert(rejections.end(), main.rejections.begin(), main.rejections.end());

  write_file_atomic(out_path, records_to_jsonl(dataset));
  write_file_atomic(rejections_path, rejections_to_jsonl(rejections));
  if (g.train_out || g.test_out) {
    auto [train, test] = split_dataset(dataset, g.train_n, g.test_n, c.rng_seed);
    if (g.train_out) write_file_atomic(*g.train_out, records_to_jsonl(train));
    if (g.test_out) write_file_atomic(*g.test_out, records_to_jsonl(test));
  }
  out << "accepted " << dataset.size() << " records, rejected " << rejections.size() << "\n";
  return kOk;
}

int cmd_format(const RunConfig& c, const std::string& dataset_path, const std::string& out_path,
               const std::optional<std::string>& finetune_path, std::ostream& out) {
  auto registry = load_registry(c);
  auto records = read_records(dataset_path);
  std::string text;
  for (const auto& r : records)
    text += chat_sample_to_json(render_training_sample(r, c.format, registry, c.separator)).dump() + "\n";
  write_file_atomic(out_path, text);
  if (finetune_path) write_file_atomic(*finetune_path, finetune_config_to_json(export_finetune_config()).dump(2) + "\n");
  out << "wrote " << records.size() << " " << to_string(c.format) << " samples to " << out_path << "\n";
  return kOk;
}

int cmd_evaluate(const RunConfig& c, const std::string& testset_path, std::ostream& out) {
  const auto& e = c.evaluate;
  auto registry = load_registry(c);
  auto testset = read_records(testset_path);
  auto backend = make_backend(c.backend);
  std::unique_ptr<SemanticScorer> scorer;
  if (e.scorer_command) scorer = std::make_unique<CommandScorer>(*e.scorer_command, c.semantic_threshold);
  else scorer = std::make_unique<OverlapScorer>(c.semantic_threshold);
  HashedBowEmbedder embedder;
  std::unique_ptr<FunctionRetriever> retriever;
  if (e.retriever == "vector") retriever = std::make_unique<VectorRetriever>(registry, embedder, e.k);
  else retriever = std::make_unique<FakeRetriever>(registry);

  EvalOptions options;
  options.separator = c.separator;
  auto emit = [&](const EvalReport& report, bool partial) {
    auto j = report_to_json(report, testset);
    j["format"] = to_string(c.format);
    if (partial) j["partial"] = true;
    std::string text = j.dump(2) + "\n";
    if (e.report) write_file_atomic(*e.report, text);
    else out << text;
  };
  EvalReport report;
  try {
    report = evaluate_model(testset, *backend, c.format, *scorer, *retriever, registry.match_modes(), options);
  } catch (const EvalAborted& aborted) {
    if (!aborted.partial().empty()) emit(aggregate(aborted.partial()), true);
    throw;
  }
  emit(report, false);
  if (e.report) out << "acc " << report.acc << " acc_soft " << report.acc_soft << "\n";
  if (e.acc_floor && report.acc < *e.acc_floor) return kBelowFloor;
  return kOk;
}

CallPlan read_plan(const std::string& text, const Separator& sep) {
  auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && (text[first] == '[' || text[first] == '{')) return parse_json_answer(text);
  return parse_code_answer(text, sep);
}

int cmd_dispatch(const RunConfig& c, const std::string& plan_path, const std::optional<std::string>& snapshot_in,
                 const std::optional<std::string>& snapshot_out, const std::optional<std::string>& results_out,
                 std::ostream& out) {
  CallPlan plan = read_plan(read_text_file(plan_path), c.separator);
  DeviceState state;
  if (snapshot_in) {
    std::string text = read_text_file(*snapshot_in);
    state = restore(text);
  }
  auto result = execute_plan(plan, state);
  ordered_json results = ordered_json::array();
  for (const auto& r : result.results) results.push_back(intent_result_to_json(r));
  std::string snap = snapshot(result.state);
  if (results_out) write_file_atomic(*results_out, results.dump(2) + "\n");
  else out << results.dump(2) << "\n";
  if (snapshot_out) write_file_atomic(*snapshot_out, snap + "\n");
  else out << snap << "\n";
  bool all_ok = std::all_of(result.results.begin(), result.results.end(), [](const IntentResult& r) { return r.ok; });
  return all_ok ? kOk : kValidationError;
}

int cmd_stats(const RunConfig& c, const std::string& dataset_path, std::ostream& out) {
  auto registry = load_registry(c);
  auto records = read_records(dataset_path);
  TokenizerHandle tok = c.tokenizer == "whitespace" ? whitespace_tokenizer() : command_tokenizer(c.tokenizer);
  auto stats = token_stats(records, c.format, tok, registry);
  ordered_json j;
  j["format"] = to_string(c.format);
  j["tokenizer"] = tok.id;
  j["n"] = records.size();
  j["mean"] = stats.mean;
  j["per_sample"] = stats.per_sample;
  out << j.dump() << "\n";
  return kOk;
}

int cmd_retrieve(const RunConfig& c, const std::string& text, std::ostream& out) {
  auto registry = load_registry(c);
  std::unique_ptr<Embedder> embedder;
  if (c.embedder_command) embedder = std::make_unique<CommandEmbedder>(*c.embedder_command, c.embedder_dim);
  else embedder = std::make_unique<HashedBowEmbedder>(c.embedder_dim);
  auto index = index_functions(registry, *embedder);
  for (const auto& [name, score] : query(index, text, *embedder, c.retrieve_k)) out << name << "\t" << score << "\n";
  return kOk;
}

int exit_code_for(const std::exception& ex, std::ostream& err) {
  err << "error: " << ex.what() << "\n";
  if (dynamic_cast<const ConfigError*>(&ex)) return kConfigError;
  if (auto* b = dynamic_cast<const BackendError*>(&ex))
    return b->kind() == BackendErrc::InvalidConfig ? kConfigError : kBackendError;
  if (dynamic_cast<const EvalAborted*>(&ex)) return kBackendError;
  if (dynamic_cast<const IoError*>(&ex)) return kIoError;
  if (dynamic_cast<const fs::filesystem_error*>(&ex)) return kIoError;
  return kValidationError;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Function-calling dataset, evaluation and dispatch toolkit", "droidcall"};
  app.require_subcommand(1);

  std::string config_path;
  std::uint64_t rng_seed = 0;
  std::string format, backend;
  std::size_t jobs = 1;
  double threshold = 0.75;
  bool verbose = false;
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--rng-seed", rng_seed, "Seed for every random choice");
  auto* format_opt = app.add_option("--format", format, "Prompt format")
                         ->check(CLI::IsMember({"json", "code", "json_short", "code_short"}));
  auto* backend_opt = app.add_option("--backend", backend, "LLM backend")->check(CLI::IsMember({"mock", "http"}));
  auto* jobs_opt = app.add_option("--jobs", jobs, "Maximum in-flight LLM calls")->check(CLI::PositiveNumber);
  auto* threshold_opt = app.add_option("--threshold", threshold,
                                       "Dedup threshold for generate, semantic-match threshold for evaluate")
                            ->check(CLI::Range(0.0, 1.0));
  std::string script_path;
  auto* script_opt = app.add_option("--mock-script", script_path, "Mock backend script (digest -> response)");
  std::string endpoint;
  auto* endpoint_opt = app.add_option("--endpoint", endpoint, "Chat-completions URL for the http backend");
  app.add_flag("-v,--verbose", verbose, "Log progress to stderr");

  auto* extract = app.add_subcommand("extract", "Parse function sources into schema JSON files");
  std::string src_dir, extract_out;
  extract->add_option("src_dir", src_dir, "Directory of *.src files")->required();
  extract->add_option("--out", extract_out, "Output directory")->required();

  auto* generate = app.add_subcommand("generate", "Run the seed and main generation stages");
  std::string corpus, gen_out, gen_rej;
  auto* corpus_opt = generate->add_option("--corpus", corpus, "External corpus (JSON lines)");
  auto* gen_out_opt = generate->add_option("--out", gen_out, "Dataset output (JSON lines)");
  auto* gen_rej_opt = generate->add_option("--rejections", gen_rej, "Rejection report output (JSON lines)");

  auto* fmt = app.add_subcommand("format", "Export chat-formatted training samples");
  std::string fmt_in, fmt_out, finetune_out;
  fmt->add_option("dataset", fmt_in, "Dataset (JSON lines)")->required();
  fmt->add_option("--out", fmt_out, "Training samples output (JSON lines)")->required();
  auto* finetune_opt = fmt->add_option("--finetune-config", finetune_out, "Also write the fine-tuning config here");

  auto* evaluate = app.add_subcommand("evaluate", "Score a model on a test set");
  std::string eval_in, eval_report, retriever_kind;
  double acc_floor = 0.0;
  std::size_t eval_k = kDefaultRetrieveK;
  evaluate->add_option("testset", eval_in, "Test set (JSON lines)")->required();
  auto* report_opt = evaluate->add_option("--report", eval_report, "Report output (JSON); stdout when absent");
  auto* retriever_opt = evaluate->add_option("--retriever", retriever_kind, "Function retriever")
                            ->check(CLI::IsMember({"fake", "vector"}));
  auto* k_opt = evaluate->add_option("--k", eval_k, "Functions retrieved per query (vector retriever)")
                    ->check(CLI::PositiveNumber);
  auto* floor_opt = evaluate->add_option("--acc-floor", acc_floor, "Exit with code 6 when acc is below this")
                        ->check(CLI::Range(0.0, 1.0));

  auto* disp = app.add_subcommand("dispatch", "Execute a call plan on the simulated device");
  std::string plan_in, snap_in, snap_out, results_out;
  disp->add_option("plan", plan_in, "Plan file (JSON answers or code lines)")->required();
  auto* snap_in_opt = disp->add_option("--snapshot", snap_in, "Starting device snapshot");
  auto* snap_out_opt = disp->add_option("--out-snapshot", snap_out, "Write the final snapshot here");
  auto* results_opt = disp->add_option("--results", results_out, "Write intent results here");

  auto* stats = app.add_subcommand("stats", "Token statistics of rendered prompts");
  std::string stats_in, tokenizer;
  stats->add_option("dataset", stats_in, "Dataset (JSON lines)")->required();
  auto* tokenizer_opt =
      stats->add_option("--tokenizer", tokenizer, "\"whitespace\" or a command printing a token count");

  auto* retrieve = app.add_subcommand("retrieve", "Top-k functions for a query");
  std::string query_text;
  std::size_t retrieve_k = kDefaultRetrieveK;
  retrieve->add_option("query", query_text, "Query text")->required();
  auto* retrieve_k_opt = retrieve->add_option("--k", retrieve_k, "Number of functions")->check(CLI::PositiveNumber);

  for (auto* sub : {extract, generate, fmt, evaluate, disp, stats, retrieve}) sub->fallthrough();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kConfigError;
  }

  auto logger = cli_logger();
  logger->set_level(verbose ? spdlog::level::info : spdlog::level::warn);
  auto previous = spdlog::default_logger();
  spdlog::set_default_logger(logger);
  struct RestoreLogger {
    std::shared_ptr<spdlog::logger> prev;
    ~RestoreLogger() { spdlog::set_default_logger(prev); }
  } restore_logger{previous};

  try {
    RunConfig c;
    if (!config_path.empty()) load_config(config_path, c);
    // Flags win over the config file.
    if (seed_opt->count()) c.rng_seed = rng_seed;
    if (format_opt->count()) c.format = parse_format(format);
    if (backend_opt->count()) c.backend.backend = parse_backend_kind(backend);
    if (jobs_opt->count()) c.jobs = jobs;
    if (threshold_opt->count()) c.dedup_threshold = c.semantic_threshold = threshold;
    if (script_opt->count()) c.backend.script_path = script_path;
    if (endpoint_opt->count()) c.backend.endpoint = endpoint;

    if (extract->parsed()) return cmd_extract(src_dir, extract_out, out);
    if (generate->parsed()) {
      if (corpus_opt->count()) c.generate.corpus = corpus;
      if (gen_out_opt->count()) c.generate.out = gen_out;
      if (gen_rej_opt->count()) c.generate.rejections = gen_rej;
      return cmd_generate(c, out);
    }
    if (fmt->parsed())
      return cmd_format(c, fmt_in, fmt_out, finetune_opt->count() ? std::optional(finetune_out) : std::nullopt, out);
    if (evaluate->parsed()) {
      if (report_opt->count()) c.evaluate.report = eval_report;
      if (retriever_opt->count()) c.evaluate.retriever = retriever_kind;
      if (k_opt->count()) c.evaluate.k = eval_k;
      if (floor_opt->count()) c.evaluate.acc_floor = acc_floor;
      return cmd_evaluate(c, eval_in, out);
    }
    if (disp->parsed()) {
      auto opt = [](CLI::Option* o, const std::string& v) { return o->count() ? std::optional(v) : std::nullopt; };
      return cmd_dispatch(c, plan_in, opt(snap_in_opt, snap_in), opt(snap_out_opt, snap_out),
                          opt(results_opt, results_out), out);
    }
    if (stats->parsed()) {
      if (tokenizer_opt->count()) c.tokenizer = tokenizer;
      return cmd_stats(c, stats_in, out);
    }
    if (retrieve->parsed()) {
      if (retrieve_k_opt->count()) c.retrieve_k = retrieve_k;
      return cmd_retrieve(c, query_text, out);
    }
  } catch (const std::exception& ex) {
    return exit_code_for(ex, err);
  }
  return kConfigError;
}

}  // namespace droidcall::cli
