#include <gtest/gtest.h>

#include "droidcall/call_plan.hpp"
#include "droidcall/prompt_formats.hpp"
#include "support/fixtures.hpp"

using namespace droidcall;
using droidcall::testing::Rng;

namespace {

const char* kTimerAndDialJson = R"([
  {"id": 0, "name": "ACTION_SET_TIMER", "arguments": {"duration": "30 minutes"}},
  {"id": 1, "name": "dial", "arguments": {"phone_number": "123456"}}
])";

PlanErrc plan_errc(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const PlanError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected PlanError";
  return PlanErrc::NotJson;
}

}  // namespace

TEST(ParseJsonAnswer, TimerAndDial) {
  auto plan = parse_json_answer(kTimerAndDialJson);
  ASSERT_EQ(plan.size(), 2u);
  EXPECT_TRUE(plan.edges().empty());
  EXPECT_EQ(plan, droidcall::testing::timer_and_dial_record().answers);
}

TEST(ParseJsonAnswer, RefMakesEdge) {
  auto plan = parse_json_answer(R"([{"id":0,"name":"g","arguments":{}},
      {"id":1,"name":"f","arguments":{"arg1":"v","arg2":"#0"}}])");
  EXPECT_EQ(plan.edges(), (std::set<std::pair<std::size_t, std::size_t>>{{1, 0}}));
  EXPECT_EQ(plan.calls[1].arguments.at("arg2"), ArgValue(Ref{0}));
}

TEST(ParseJsonAnswer, Errors) {
  EXPECT_EQ(plan_errc([] { parse_json_answer(R"([{"id":0,"name":"f","arguments":{"x":"#0"}}])"); }),
            PlanErrc::BadReference);
  EXPECT_EQ(plan_errc([] { parse_json_answer(R"([{"id":0,"name":"f","arguments":{"x":"#4"}}])"); }),
            PlanErrc::BadReference);
  EXPECT_EQ(plan_errc([] { parse_json_answer("not json at all"); }), PlanErrc::NotJson);
  EXPECT_EQ(plan_errc([] { parse_json_answer(R"([{"id":0,"arguments":{}}])"); }), PlanErrc::BadCallShape);
  EXPECT_EQ(plan_errc([] { parse_json_answer(R"([{"name":"f","arguments":{"x":"#1"}},
                                                  {"name":"g","arguments":{"y":"#0"}}])"); }),
            PlanErrc::BadReference);
}

TEST(ParseJsonAnswer, MissingIdsArePositional) {
  auto plan = parse_json_answer(R"([{"name":"a","arguments":{}},{"name":"b","arguments":{}}])");
  EXPECT_EQ(plan.calls[0].id, 0u);
  EXPECT_EQ(plan.calls[1].id, 1u);
}

TEST(ParseCodeAnswer, TimerAndDial) {
  auto plan = parse_code_answer(
      "result1 = ACTION_SET_TIMER(duration=\"30 minutes\")\nresult2 = dial(phone_number=\"123456\")");
  EXPECT_EQ(plan, droidcall::testing::timer_and_dial_record().answers);
}

TEST(ParseCodeAnswer, ResultVariableIsRef) {
  auto plan = parse_code_answer("result1 = g()\nresult2 = f(x=result1)");
  EXPECT_EQ(plan.edges(), (std::set<std::pair<std::size_t, std::size_t>>{{1, 0}}));
}

TEST(ParseCodeAnswer, SeparatorsStripped) {
  auto plan = parse_code_answer("<sep>result1 = dial(phone_number=\"1\")</sep>");
  ASSERT_EQ(plan.size(), 1u);
  Separator custom{"[[", "]]"};
  EXPECT_EQ(parse_code_answer("[[\nresult1 = dial(phone_number=\"1\")\n]]", custom), plan);
}

TEST(ParseCodeAnswer, Errors) {
  EXPECT_EQ(plan_errc([] { parse_code_answer("result1 = g()\nresult2 = f(x=result9)"); }),
            PlanErrc::UnboundResultVar);
  try {
    parse_code_answer("result1 = g()\nresult2 = f(x=\"a\" y=1)");
    FAIL();
  } catch (const PlanError& e) {
    EXPECT_EQ(e.kind(), PlanErrc::SyntaxError);
    EXPECT_EQ(e.line(), 2u);
    EXPECT_GT(e.column(), 0u);
  }
  EXPECT_EQ(plan_errc([] { parse_code_answer("result1 = f(x=result1)"); }), PlanErrc::BadReference);
}

TEST(ValidatePlan, Cases) {
  auto reg = load_default_registry();
  EXPECT_TRUE(validate_plan(droidcall::testing::alarm_record().answers, reg).empty());

  CallPlan missing{{{0, "dial", {}}}};
  auto v = validate_plan(missing, reg);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::MissingRequiredArgument);

  CallPlan wrong_type{{{0, "ACTION_SET_ALARM", {{"EXTRA_HOUR", "8"}, {"EXTRA_MINUTE", 30}}}}};
  v = validate_plan(wrong_type, reg);
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, ViolationKind::TypeMismatch);

  CallPlan unknown{{{0, "nope", {}}, {1, "dial", {{"phone_number", "1"}, {"extra", 1}}}}};
  v = validate_plan(unknown, reg);
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[0].kind, ViolationKind::UnknownFunction);
  EXPECT_EQ(v[1].kind, ViolationKind::UnknownArgument);

  // Refs are not type-checked and satisfy required arguments.
  CallPlan with_ref{{{0, "get_contact_info", {{"name", "Ann"}, {"key", "phone"}}},
                     {1, "ACTION_SET_ALARM", {{"EXTRA_HOUR", Ref{0}}, {"EXTRA_MINUTE", 0}}}}};
  EXPECT_TRUE(validate_plan(with_ref, reg).empty());

  CallPlan cyclic{{{0, "dial", {{"phone_number", Ref{1}}}}, {1, "dial", {{"phone_number", Ref{0}}}}}};
  v = validate_plan(cyclic, reg);
  ASSERT_FALSE(v.empty());
  EXPECT_EQ(v.back().kind, ViolationKind::BadReference);
}

TEST(TopoOrder, Cases) {
  CallPlan three{{{0, "a", {}}, {1, "b", {}}, {2, "c", {}}}};
  EXPECT_EQ(topo_order(three), (std::vector<std::size_t>{0, 1, 2}));
  CallPlan edge{{{0, "a", {}}, {1, "b", {{"x", Ref{0}}}}}};
  EXPECT_EQ(topo_order(edge), (std::vector<std::size_t>{0, 1}));
  CallPlan backwards{{{0, "a", {{"x", Ref{2}}}}, {1, "b", {}}, {2, "c", {}}}};
  EXPECT_EQ(topo_order(backwards), (std::vector<std::size_t>{1, 2, 0}));
  CallPlan cyc{{{0, "a", {{"x", Ref{1}}}}, {1, "b", {{"x", Ref{0}}}}}};
  try {
    topo_order(cyc);
    FAIL();
  } catch (const CycleDetected& e) {
    // The first node is repeated at the end.
    EXPECT_EQ(e.cycle().size(), 3u);
    EXPECT_EQ(e.cycle().front(), e.cycle().back());
  }
}

TEST(Canonicalize, Equality) {
  CallPlan a{{{0, "dial", {{"phone_number", "1"}}}, {1, "f", {{"x", Ref{0}}, {"y", 8}}}}};
  CallPlan b{{{0, "f", {{"y", 8}, {"x", Ref{1}}}}, {1, "dial", {{"phone_number", "1"}}}}};
  EXPECT_TRUE(plans_equal(a, b));
  EXPECT_EQ(canonicalize(a), canonicalize(b));
  CallPlan c = a;
  c.calls[1].arguments["y"] = 8.0;
  EXPECT_FALSE(plans_equal(a, c));
  // Same text through both wire forms, different result variable names.
  auto code = parse_code_answer("r7 = dial(phone_number=\"1\")\nx = f(x=r7, y=8)");
  EXPECT_TRUE(plans_equal(a, code));
}

TEST(Canonicalize, Idempotent) {
  auto reg = load_default_registry();
  Rng rng(11);
  droidcall::testing::PlanShape shape;
  shape.nested_lists = true;
  for (int i = 0; i < 200; ++i) {
    auto p = droidcall::testing::random_plan(rng, reg, shape);
    auto c = canonicalize(p);
    EXPECT_EQ(canonicalize(c), c);
    EXPECT_TRUE(plans_equal(p, c));
    EXPECT_TRUE(plans_equal(c, p));
  }
}

// render -> parse -> canonicalize is the identity, for every wire format.
TEST(RoundTrip, RandomPlansAllFormats) {
  auto reg = load_default_registry();
  Rng rng(2024);
  droidcall::testing::PlanShape shape;
  shape.hard_strings = true;
  shape.nested_lists = true;
  for (int i = 0; i < 300; ++i) {
    auto plan = droidcall::testing::random_plan(rng, reg, shape);
    ASSERT_TRUE(validate_plan(plan, reg).empty());
    for (auto f : {PromptFormat::Json, PromptFormat::Code, PromptFormat::JsonShort, PromptFormat::CodeShort}) {
      auto text = render_answer(plan, f);
      auto back = parse_answer(text, f);
      EXPECT_EQ(canonicalize(back), canonicalize(plan)) << to_string(f) << "\n" << text;
    }
  }
}

TEST(Isomorphism, IdentityAndMismatch) {
  auto l4 = droidcall::testing::timer_and_dial_record().answers;
  auto m = find_plan_isomorphism(l4, l4);
  ASSERT_TRUE(m.has_value());
  EXPECT_EQ(*m, (std::vector<std::size_t>{0, 1}));
  auto other = l4;
  other.calls[1].arguments["phone_number"] = "999";
  EXPECT_FALSE(find_plan_isomorphism(l4, other).has_value());
  ArgumentComparator lenient = [](const FunctionCall&, std::string_view arg, const ArgValue&,
                                  const ArgValue&) -> std::optional<bool> {
    if (arg == "phone_number") return true;
    return std::nullopt;
  };
  EXPECT_TRUE(find_plan_isomorphism(l4, other, lenient).has_value());
}
