#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "droidcall/device_state.hpp"
#include "droidcall/evaluation.hpp"
#include "droidcall/io.hpp"
#include "droidcall/llm_backend.hpp"
#include "droidcall/prompt_formats.hpp"
#include "support/eval_oracle.hpp"
#include "support/fixtures.hpp"

using namespace droidcall;
namespace dt = droidcall::testing;
namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("droidcall_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string path(const std::string& name) const { return (dir_ / name).string(); }
  void write(const std::string& name, const std::string& text) const { std::ofstream(dir_ / name) << text; }

  int run(std::vector<std::string> args) {
    args.insert(args.begin(), "droidcall");
    out_.str("");
    err_.str("");
    return cli::run_cli(args, out_, err_);
  }

  fs::path dir_;
  std::ostringstream out_, err_;
};

std::string timer_and_dial_code() {
  return "result1 = ACTION_SET_TIMER(duration=\"30 minutes\")\nresult2 = dial(phone_number=\"123456\")\n";
}

// Mock script answering each evaluation prompt of `set` with `answer(record)`.
std::string eval_script(const std::vector<GenerationRecord>& set, PromptFormat f,
                        const std::function<CallPlan(const GenerationRecord&)>& answer) {
  auto reg = load_default_registry();
  json script = json::object();
  for (const auto& r : set) {
    auto p = render_eval_prompt(f, fake_retrieve(r, reg), r.query);
    script[prompt_digest(ChatPrompt{p.system, p.user})] = render_answer(answer(r), f);
  }
  return script.dump();
}

}  // namespace

TEST_F(CliTest, HelpListsEveryFlag) {
  EXPECT_EQ(run({"--help"}), cli::kOk);
  for (const char* flag : {"--config", "--rng-seed", "--format", "--backend", "--jobs", "--threshold"})
    EXPECT_NE(out_.str().find(flag), std::string::npos) << flag;
  EXPECT_EQ(run({"evaluate", "--help"}), cli::kOk);
  EXPECT_NE(out_.str().find("--acc-floor"), std::string::npos);
}

TEST_F(CliTest, BadFlagsAreConfigErrors) {
  EXPECT_EQ(run({}), cli::kConfigError);
  EXPECT_EQ(run({"--format", "yaml", "stats", "x"}), cli::kConfigError);
  EXPECT_EQ(run({"--threshold", "1.5", "stats", "x"}), cli::kConfigError);
  write("bad.json", R"({"rng_seed": 1, "colour": "red"})");
  EXPECT_EQ(run({"--config", path("bad.json"), "retrieve", "alarm"}), cli::kConfigError);
  EXPECT_NE(err_.str().find("colour"), std::string::npos);
  write("range.json", R"({"dedup_threshold": 2})");
  EXPECT_EQ(run({"--config", path("range.json"), "retrieve", "alarm"}), cli::kConfigError);
  write("nested.json", R"({"evaluate": {"k": 3, "what": 1}})");
  EXPECT_EQ(run({"--config", path("nested.json"), "retrieve", "alarm"}), cli::kConfigError);
}

TEST_F(CliTest, MissingInputIsIoError) {
  EXPECT_EQ(run({"stats", path("nope.jsonl")}), cli::kIoError);
  EXPECT_EQ(run({"dispatch", path("nope.txt")}), cli::kIoError);
}

TEST_F(CliTest, DispatchTimerAndDial) {
  write("plan.txt", timer_and_dial_code());
  EXPECT_EQ(run({"dispatch", path("plan.txt"), "--out-snapshot", path("snap.json"), "--results", path("res.json")}),
            cli::kOk)
      << err_.str();
  auto state = restore(read_text_file(path("snap.json")));
  EXPECT_EQ(state.timers.size(), 1u);
  EXPECT_EQ(state.call_log, (std::vector<std::string>{"123456"}));
  auto res = json::parse(read_text_file(path("res.json")));
  EXPECT_EQ(res.size(), 2u);
  // Continue from the snapshot with a JSON plan.
  write("plan2.json", R"([{"id": 0, "name": "dial", "arguments": {"phone_number": "777"}}])");
  EXPECT_EQ(run({"dispatch", path("plan2.json"), "--snapshot", path("snap.json"), "--out-snapshot", path("snap2.json")}),
            cli::kOk);
  EXPECT_EQ(restore(read_text_file(path("snap2.json"))).call_log, (std::vector<std::string>{"123456", "777"}));
  for (const auto& e : fs::directory_iterator(dir_))
    EXPECT_EQ(e.path().filename().string().find(".tmp"), std::string::npos) << e.path();
}

TEST_F(CliTest, DispatchFailuresAreValidationErrors) {
  write("bad.txt", "result1 = ACTION_SET_ALARM(EXTRA_HOUR=25, EXTRA_MINUTE=0)\n");
  EXPECT_EQ(run({"dispatch", path("bad.txt")}), cli::kValidationError);
  EXPECT_NE(out_.str().find("\"error\""), std::string::npos);
  write("cycle.json", R"([{"name": "dial", "arguments": {"phone_number": "#1"}},
                          {"name": "dial", "arguments": {"phone_number": "#0"}}])");
  EXPECT_EQ(run({"dispatch", path("cycle.json")}), cli::kValidationError);
  write("syntax.txt", "result1 = dial(phone_number=\n");
  EXPECT_EQ(run({"dispatch", path("syntax.txt")}), cli::kValidationError);
}

TEST_F(CliTest, GenerateIsReproducible) {
  auto corpus = R"({"query": "weather in Paris", "answers": [{"name": "weather", "arguments": {"city": "Paris"}}]})";
  write("corpus.jsonl", std::string(corpus) + "\n");
  json response = json::array(
      {json::parse(R"({"query": "call my dentist right now please", "answers": [{"id": 0, "name": "dial", "arguments": {"phone_number": "5550100"}}]})"),
       json::parse(R"({"query": "call my dentist right now please", "answers": [{"id": 0, "name": "dial", "arguments": {"phone_number": "5550100"}}]})"),
       json::parse(R"({"query": "ring the bakery on main street", "answers": [{"id": 0, "name": "dial", "arguments": {"phone_number": "5550111"}}]})")});
  write("script.json", json{{"*", "Here:\n" + response.dump(2)}}.dump());
  write("cfg.json", json{{"rng_seed", 5},
                         {"backend", {{"kind", "mock"}, {"script", path("script.json")}}},
                         {"generate", {{"corpus", path("corpus.jsonl")}, {"seed_batches", 1}, {"simple_rounds", 1},
                                       {"complex_rounds", 0}}}}
                        .dump());
  ASSERT_EQ(run({"--config", path("cfg.json"), "generate", "--out", path("a.jsonl"), "--rejections", path("a.rej")}),
            cli::kOk)
      << err_.str();
  ASSERT_EQ(run({"--config", path("cfg.json"), "generate", "--out", path("b.jsonl"), "--rejections", path("b.rej")}),
            cli::kOk);
  auto a = read_text_file(path("a.jsonl"));
  EXPECT_EQ(a, read_text_file(path("b.jsonl")));
  EXPECT_EQ(read_text_file(path("a.rej")), read_text_file(path("b.rej")));
  auto records = read_records(path("a.jsonl"));
  EXPECT_EQ(records.size(), 2u);
  EXPECT_FALSE(read_text_file(path("a.rej")).empty());
  // Flags win over the config file.
  write("cfg_bad_seed.json", R"({"rng_seed": "not a number"})");
  EXPECT_EQ(run({"--config", path("cfg_bad_seed.json"), "retrieve", "alarm"}), cli::kConfigError);
  ASSERT_EQ(run({"--config", path("cfg.json"), "--threshold", "0", "generate", "--out", path("c.jsonl")}), cli::kOk);
  EXPECT_EQ(read_records(path("c.jsonl")).size(), 1u);
}

TEST_F(CliTest, GenerateWithoutCorpusIsConfigError) {
  EXPECT_EQ(run({"generate", "--out", path("x.jsonl")}), cli::kConfigError);
}

TEST_F(CliTest, FormatRoundTripsAndExportsConfig) {
  auto reg = load_default_registry();
  auto data = dt::fixture_testset(reg, 30, 2);
  write("data.jsonl", records_to_jsonl(data));
  for (const char* f : {"json", "code", "json_short", "code_short"}) {
    ASSERT_EQ(run({"--format", f, "format", path("data.jsonl"), "--out", path("train.jsonl"), "--finetune-config",
                   path("ft.json")}),
              cli::kOk)
        << err_.str();
    auto rows = parse_jsonl(read_text_file(path("train.jsonl")));
    ASSERT_EQ(rows.size(), data.size());
    auto fmt = *prompt_format_from_string(f);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      auto sample = chat_sample_from_json(rows[i]);
      EXPECT_EQ(sample, render_training_sample(data[i], fmt, reg));
      EXPECT_EQ(canonicalize(parse_answer(sample.assistant, fmt)), canonicalize(data[i].answers));
    }
  }
  auto ft = finetune_config_from_json(json::parse(read_text_file(path("ft.json"))));
  EXPECT_EQ(ft, export_finetune_config());
}

TEST_F(CliTest, EvaluateEchoGoldAndFloor) {
  auto reg = load_default_registry();
  auto data = dt::fixture_testset(reg, 20, 5);
  write("test.jsonl", records_to_jsonl(data));
  write("echo.json", eval_script(data, PromptFormat::Code, [](const GenerationRecord& r) { return r.answers; }));
  ASSERT_EQ(run({"--format", "code", "--mock-script", path("echo.json"), "evaluate", path("test.jsonl"), "--report",
                 path("report.json"), "--acc-floor", "1.0"}),
            cli::kOk)
      << err_.str();
  auto rep = json::parse(read_text_file(path("report.json")));
  EXPECT_EQ(rep["acc"], 1.0);
  EXPECT_EQ(rep["acc_soft"], 1.0);

  write("bad.json", eval_script(data, PromptFormat::Code, [](const GenerationRecord& r) {
          auto p = r.answers;
          dt::corrupt_value(p.calls[0].arguments.begin()->second);
          return p;
        }));
  EXPECT_EQ(run({"--format", "code", "--mock-script", path("bad.json"), "evaluate", path("test.jsonl"), "--acc-floor",
                 "0.5"}),
            cli::kBelowFloor);
  auto printed = json::parse(out_.str());
  EXPECT_EQ(printed["acc"], 0.0);
}

TEST_F(CliTest, EvaluateBackendFailureWritesPartialReport) {
  auto reg = load_default_registry();
  auto data = dt::fixture_testset(reg, 4, 6);
  write("test.jsonl", records_to_jsonl(data));
  std::vector<GenerationRecord> first{data[0]};
  write("partial.json", eval_script(first, PromptFormat::Json, [](const GenerationRecord& r) { return r.answers; }));
  EXPECT_EQ(run({"--mock-script", path("partial.json"), "evaluate", path("test.jsonl"), "--report", path("r.json")}),
            cli::kBackendError);
  auto rep = json::parse(read_text_file(path("r.json")));
  EXPECT_EQ(rep["partial"], true);
  EXPECT_EQ(rep["n_total"], 1);
}

TEST_F(CliTest, StatsAndRetrieveAndExtract) {
  auto reg = load_default_registry();
  write("data.jsonl", records_to_jsonl(dt::fixture_testset(reg, 10, 8)));
  ASSERT_EQ(run({"--format", "code_short", "stats", path("data.jsonl")}), cli::kOk) << err_.str();
  auto cs = json::parse(out_.str());
  ASSERT_EQ(run({"stats", path("data.jsonl"), "--tokenizer", "wc -w"}), cli::kOk) << err_.str();
  auto js = json::parse(out_.str());
  EXPECT_EQ(cs["n"], 10);
  EXPECT_LT(cs["mean"].get<double>(), js["mean"].get<double>());
  EXPECT_EQ(js["tokenizer"], "command:wc -w");

  ASSERT_EQ(run({"retrieve", "wake me up alarm morning", "--k", "3"}), cli::kOk);
  EXPECT_NE(out_.str().find("ACTION_SET_ALARM"), std::string::npos);
  EXPECT_EQ(run({"retrieve", "x", "--k", "30"}), cli::kValidationError);

  ASSERT_EQ(run({"extract", DROIDCALL_FUNCTIONS_DIR, "--out", path("schemas")}), cli::kOk) << err_.str();
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(path("schemas"))) {
    auto s = deserialize_schema(read_text_file(e.path()));
    EXPECT_EQ(s, *reg.find(s.name));
    ++n;
  }
  EXPECT_EQ(n, 24u);
  write("broken.src", "def nope(:\n");
  fs::create_directories(path("src"));
  fs::rename(path("broken.src"), path("src/broken.src"));
  EXPECT_EQ(run({"extract", path("src"), "--out", path("o")}), cli::kValidationError);
}
