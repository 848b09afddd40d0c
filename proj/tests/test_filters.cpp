#include <gtest/gtest.h>

#include <random>

#include "droidcall/filters.hpp"
#include "droidcall/prompt_formats.hpp"
#include "support/fixtures.hpp"
#include "support/oracles.hpp"

using namespace droidcall;
namespace dt = droidcall::testing;

namespace {

const char* kAlarmRecord =
    R"({"query": "Wake me up at 8:30", "answers": [{"id": 0, "name": "ACTION_SET_ALARM", "arguments": {"EXTRA_HOUR": 8, "EXTRA_MINUTE": 30}}]})";

std::string record_text(const std::string& query) {
  return R"({"query": ")" + query +
         R"(", "answers": [{"id": 0, "name": "dial", "arguments": {"phone_number": "5550100"}}]})";
}

}  // namespace

TEST(ExtractJson, FencedBlockIsFlattened) {
  auto v = extract_json_values("Sure! ```json\n[" + std::string(kAlarmRecord) + "]\n```");
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0]["query"], "Wake me up at 8:30");
}

TEST(ExtractJson, ProseOnly) { EXPECT_TRUE(extract_json_values("no braces here, just words.").empty()); }

TEST(ExtractJson, UnbalancedFirstObjectSkipped) {
  std::string raw = "first: {\"query\": \"a\", \"answers\": [ oops\nthen some commentary\nsecond: {\"k\": 1}";
  auto v = extract_json_values(raw);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0], json::parse(R"({"k": 1})"));
}

TEST(ExtractJson, BracesInsideStringsAndTextualOrder) {
  auto v = extract_json_values(R"(x {"a": "}{]["} y [1, 2] z {"b": {"c": []}})");
  ASSERT_EQ(v.size(), 3u);
  EXPECT_EQ(v[0]["a"], "}{][");
  EXPECT_EQ(v[1], json::parse("[1, 2]"));  // not all objects: kept whole
  EXPECT_EQ(v[2]["b"]["c"], json::array());
}

TEST(ExtractJson, EveryValueParsesStrictly) {
  std::mt19937_64 rng(5);
  const char* pieces[] = {"{", "}", "[", "]", "\"", ",", ":", "1", "\"s\"", " ", "x", "{\"a\":1}", "[{}]", "\\"};
  for (int i = 0; i < 2000; ++i) {
    std::string raw;
    for (int k = 0; k < 20; ++k) raw += pieces[rng() % std::size(pieces)];
    for (const auto& v : extract_json_values(raw)) {
      EXPECT_FALSE(json::parse(v.dump(), nullptr, false).is_discarded());
      EXPECT_TRUE(v.is_object() || v.is_array());
    }
  }
}

TEST(ValidateRecord, AlarmRecordAccepted) {
  auto reg = load_default_registry();
  auto check = validate_record(json::parse(kAlarmRecord), reg);
  ASSERT_TRUE(check.accepted());
  EXPECT_EQ(*check.record, dt::alarm_record());
}

TEST(ValidateRecord, Rejections) {
  auto reg = load_default_registry();
  auto kind = [&](const std::string& text) {
    auto check = validate_record(json::parse(text), reg);
    EXPECT_FALSE(check.accepted()) << text;
    return check.rejection ? check.rejection->kind : RecordErrc::BadShape;
  };
  EXPECT_EQ(kind(R"({"query": "q", "answers": [{"id": 0, "name": "fly", "arguments": {}}]})"),
            RecordErrc::UnknownFunction);
  EXPECT_EQ(kind(R"({"query": "q", "answers": [{"id": 0, "name": "dial", "arguments": {"phone_number": "#1"}},
                    {"id": 1, "name": "dial", "arguments": {"phone_number": "1"}}]})"),
            RecordErrc::BadReference);
  EXPECT_EQ(kind(R"({"answers": []})"), RecordErrc::MissingKey);
  EXPECT_EQ(kind(R"({"query": "q", "answers": [{"id": 0, "name": "dial", "arguments": {}}]})"),
            RecordErrc::MissingRequiredArgument);
  EXPECT_EQ(kind(R"({"query": "q", "answers": [{"id": 0, "name": "dial", "arguments": {"phone_number": "1", "x": 2}}]})"),
            RecordErrc::UnknownArgument);
  EXPECT_EQ(kind(R"({"query": "q", "answers": [{"id": 0, "name": "dial"}]})"), RecordErrc::MissingKey);
  EXPECT_EQ(kind(R"({"query": "q", "answers": [], "extra": 1})"), RecordErrc::BadShape);
  EXPECT_EQ(kind(R"([1, 2])"), RecordErrc::BadShape);
}

TEST(ValidateRecord, RefSuppliesRequiredArgument) {
  auto reg = load_default_registry();
  auto check = validate_record(json::parse(R"({"query": "call Ann", "answers": [
      {"id": 0, "name": "get_contact_info", "arguments": {"name": "Ann", "key": "phone"}},
      {"id": 1, "name": "dial", "arguments": {"phone_number": "#0"}}]})"),
                               reg);
  ASSERT_TRUE(check.accepted());
  EXPECT_EQ(check.record->answers.calls[1].arguments.at("phone_number"), ArgValue(Ref{0}));
}

TEST(ValidateRecord, AcceptsOwnRenderedRecords) {
  auto reg = load_default_registry();
  for (const auto& r : dt::fixture_testset(reg, 200, 3)) {
    auto text = render_answer(r.answers, PromptFormat::Json);
    GenerationRecord back{r.query, parse_answer(text, PromptFormat::Json)};
    auto check = validate_record(json::parse(record_to_json(back).dump()), reg);
    ASSERT_TRUE(check.accepted()) << check.rejection->detail;
    EXPECT_EQ(*check.record, r);
  }
}

TEST(Tokenize, LowercasePunctuationUnicodeSpace) {
  EXPECT_EQ(tokenize_query("Wake me UP, at 8:30!"), (TokenSeq{"wake", "me", "up", "at", "8:30"}));
  EXPECT_EQ(tokenize_query("a\xC2\xA0" "b\xE3\x80\x80" "c -- d"), (TokenSeq{"a", "b", "c", "d"}));
  EXPECT_TRUE(tokenize_query("  ... !! ").empty());
}

TEST(RougeL, WorkedExample) {
  TokenSeq a{"set", "an", "alarm", "at", "8"}, b{"set", "alarm", "for", "8", "am"};
  EXPECT_EQ(lcs_length(a, b), 3u);
  EXPECT_DOUBLE_EQ(rouge_l_f(a, b), 0.6);
  EXPECT_EQ(rouge_l_f(a, a), 1.0);
  EXPECT_EQ(rouge_l_f(a, TokenSeq{"x", "y"}), 0.0);
  EXPECT_EQ(rouge_l_f({}, {}), 0.0);
}

// Exhaustive up to length 5; the acceptance runner covers longer sampled pairs.
TEST(RougeL, MatchesBruteForceOracleExhaustively) {
  auto seqs = dt::all_sequences(5);
  for (const auto& a : seqs) {
    for (const auto& b : seqs) {
      std::size_t l = dt::brute_force_lcs(a, b);
      ASSERT_EQ(lcs_length(a, b), l);
      double f = rouge_l_f(a, b);
      ASSERT_EQ(f, dt::f_measure_from_lcs(l, a.size(), b.size()));
      ASSERT_EQ(f, rouge_l_f(b, a));
      ASSERT_GE(f, 0.0);
      ASSERT_LE(f, 1.0);
      ASSERT_EQ(f == 1.0, !a.empty() && a == b);
    }
  }
}

TEST(SimilarityFilter, Steps) {
  SimilarityState state;
  GenerationRecord r{"Set an alarm at 8", {}};
  EXPECT_EQ(similarity_filter_step(r, state), FilterDecision::Keep);
  EXPECT_EQ(similarity_filter_step(r, state), FilterDecision::Drop);
  GenerationRecord para{"set alarm for 8 am", {}};  // F = 0.6
  EXPECT_EQ(similarity_filter_step(para, state), FilterDecision::Keep);
  EXPECT_EQ(state.accepted_queries.size(), 2u);
  // Exactly at the threshold drops: 3 of 4 tokens shared gives F = 0.75.
  SimilarityState fresh;
  EXPECT_EQ(similarity_filter_step({"turn on the lights", {}}, fresh), FilterDecision::Keep);
  GenerationRecord edge{"turn on the fan", {}};
  EXPECT_EQ(max_similarity(tokenize_query(edge.query), fresh), 0.75);
  EXPECT_EQ(similarity_filter_step(edge, fresh), FilterDecision::Drop);
}

TEST(SimilarityFilter, AcceptedPairsStayBelowThreshold) {
  std::mt19937_64 rng(9);
  SimilarityState state;
  std::vector<std::string> kept;
  for (int i = 0; i < 400; ++i) {
    std::string q = dt::random_words(rng, 2, 6);
    if (similarity_filter_step({q, {}}, state) == FilterDecision::Keep) kept.push_back(q);
  }
  ASSERT_GT(kept.size(), 10u);
  for (std::size_t i = 0; i < kept.size(); ++i)
    for (std::size_t j = 0; j < i; ++j)
      EXPECT_LT(rouge_l_f(tokenize_query(kept[i]), tokenize_query(kept[j])), 0.75);
}

TEST(FilterChain, ValidMalformedDuplicate) {
  auto reg = load_default_registry();
  SimilarityState state;
  std::string raw = "Here you go:\n[" + record_text("call the office please") + ",\n" +
                    R"({"query": "broken", "answers": [{"id": 0, "name": "nope", "arguments": {}}]},)" + "\n" +
                    record_text("dial my sister tonight") + "]";
  auto out = run_filter_chain(raw, reg, state);
  ASSERT_EQ(out.accepted.size(), 2u);
  ASSERT_EQ(out.rejected.size(), 1u);
  EXPECT_EQ(out.rejected[0].reason, RejectReason::BadFormat);
  EXPECT_NE(out.rejected[0].detail.find("UnknownFunction"), std::string::npos);

  auto again = run_filter_chain(record_text("call the office please"), reg, state);
  EXPECT_TRUE(again.accepted.empty());
  ASSERT_EQ(again.rejected.size(), 1u);
  EXPECT_EQ(again.rejected[0].reason, RejectReason::Duplicate);

  auto empty = run_filter_chain("", reg, state);
  EXPECT_TRUE(empty.accepted.empty());
  EXPECT_TRUE(empty.rejected.empty());

  auto prose = run_filter_chain("I cannot help with that.", reg, state);
  ASSERT_EQ(prose.rejected.size(), 1u);
  EXPECT_EQ(prose.rejected[0].reason, RejectReason::NotJson);
}

TEST(FilterChain, RejectionsJsonl) {
  std::vector<Rejection> rs{{RejectReason::NotJson, "bad \xff text", ""}, {RejectReason::Duplicate, "{}", "d"}};
  auto text = rejections_to_jsonl(rs);
  auto nl = text.find('\n');
  auto first = json::parse(text.substr(0, nl));
  EXPECT_EQ(first["reason"], "NotJson");
  EXPECT_TRUE(first.contains("raw"));
  EXPECT_EQ(json::parse(text.substr(nl + 1))["reason"], "Duplicate");
}
