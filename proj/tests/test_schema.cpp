#include <gtest/gtest.h>

#include <set>
#include <sstream>

#include "droidcall/call_plan.hpp"
#include "droidcall/schema.hpp"

using namespace droidcall;

namespace {

const char* kAlarmSource = R"(def ACTION_SET_ALARM(EXTRA_HOUR: int, EXTRA_MINUTE: int):
    """
    Set an alarm.

    Args:
        EXTRA_HOUR (int): Hour.
        EXTRA_MINUTE (int): Minute.
    """
)";

std::string strip_comments(const std::string& text) {
  std::istringstream in(text);
  std::string line, out;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(' ');
    if (first != std::string::npos && line[first] == '#') continue;
    out += line + "\n";
  }
  return out;
}

}  // namespace

TEST(ParseFunctionSource, AlarmHasTwoIntegerArgs) {
  auto s = parse_function_source(kAlarmSource);
  EXPECT_EQ(s.name, "ACTION_SET_ALARM");
  ASSERT_EQ(s.arguments.size(), 2u);
  EXPECT_EQ(s.arguments[0].name, "EXTRA_HOUR");
  EXPECT_EQ(s.arguments[0].type, TypeTag::Integer);
  EXPECT_TRUE(s.arguments[0].required);
  EXPECT_EQ(s.arguments[1].type, TypeTag::Integer);
  EXPECT_FALSE(s.returns.has_value());
}

TEST(ParseFunctionSource, ZeroParamsEmptyReturns) {
  auto s = parse_function_source("def ping():\n    \"\"\"\n    Ping.\n\n    Returns:\n        None\n    \"\"\"\n");
  EXPECT_TRUE(s.arguments.empty());
  EXPECT_FALSE(s.returns.has_value());
}

TEST(ParseFunctionSource, DefaultMakesOptional) {
  auto s = parse_function_source(
      "def search(query: str, limit: int = 10):\n    \"\"\"\n    Search.\n\n    Args:\n        query (str): Text.\n"
      "        limit (int): Max hits.\n    \"\"\"\n");
  const ParamSpec* limit = s.find_param("limit");
  ASSERT_NE(limit, nullptr);
  EXPECT_FALSE(limit->required);
  ASSERT_TRUE(limit->default_value.has_value());
  EXPECT_EQ(*limit->default_value, ArgValue(10));
}

TEST(ParseFunctionSource, UndocumentedParamKeepsEmptyDescription) {
  auto s = parse_function_source("def f(a: str, b: str):\n    \"\"\"\n    F.\n\n    Args:\n        a (str): A.\n    \"\"\"\n");
  ASSERT_NE(s.find_param("b"), nullptr);
  EXPECT_EQ(s.find_param("b")->description, "");
}

TEST(ParseFunctionSource, Errors) {
  auto kind_of = [](const char* src) {
    try {
      parse_function_source(src);
    } catch (const SchemaError& e) {
      return e.kind();
    }
    ADD_FAILURE() << "no error for " << src;
    return SchemaErrc::ParseError;
  };
  EXPECT_EQ(kind_of("def broken(:\n    \"\"\"\n    X.\n    \"\"\"\n"), SchemaErrc::MalformedSignature);
  EXPECT_EQ(kind_of("def f(a: str):\n    \"\"\"\n    F.\n\n    Args:\n        zz (str): no.\n    \"\"\"\n"),
            SchemaErrc::DocstringMismatch);
  EXPECT_EQ(kind_of("def f(a: str, a: int):\n    \"\"\"\n    F.\n    \"\"\"\n"), SchemaErrc::DuplicateParam);
}

TEST(SchemaJson, RoundTripEveryBundledSchema) {
  auto reg = load_default_registry();
  for (const auto& [name, s] : reg.schemas()) {
    auto back = deserialize_schema(serialize_schema(s));
    EXPECT_EQ(back, s) << name;
  }
}

TEST(SchemaJson, OptionalFieldsStayOmitted) {
  auto s = deserialize_schema(R"({"name": "f", "description": "d", "arguments": {}})");
  EXPECT_FALSE(s.returns.has_value());
  EXPECT_TRUE(s.examples.empty());
  auto text = serialize_schema(s);
  EXPECT_EQ(text.find("returns"), std::string::npos);
  EXPECT_EQ(text.find("example"), std::string::npos);
}

TEST(SchemaJson, MissingNameAndBadJson) {
  try {
    deserialize_schema(R"({"description": "d", "arguments": {}})");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.kind(), SchemaErrc::MissingField);
    EXPECT_NE(std::string(e.what()).find("name"), std::string::npos);
  }
  try {
    deserialize_schema("{\"name\": ");
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.kind(), SchemaErrc::ParseError);
    EXPECT_GT(e.byte_offset(), 0u);
  }
}

TEST(Registry, DefaultHas24NamedFunctions) {
  auto reg = load_default_registry();
  EXPECT_EQ(reg.size(), 24u);
  for (const char* n : {"ACTION_SET_ALARM", "ACTION_SET_TIMER", "ACTION_INSERT_EVENT", "dial", "send_email"})
    EXPECT_TRUE(reg.contains(n)) << n;
  const auto* alarm = reg.find("ACTION_SET_ALARM");
  EXPECT_NE(alarm->find_param("EXTRA_HOUR"), nullptr);
  EXPECT_NE(alarm->find_param("EXTRA_MINUTE"), nullptr);
  EXPECT_NE(reg.find("dial")->find_param("phone_number"), nullptr);
}

TEST(Registry, MatchModesReferToDeclaredParams) {
  auto reg = load_default_registry();
  EXPECT_FALSE(reg.match_modes().empty());
  for (const auto& [key, mode] : reg.match_modes()) {
    ASSERT_TRUE(reg.contains(key.first)) << key.first;
    EXPECT_NE(reg.find(key.first)->find_param(key.second), nullptr) << key.second;
  }
  EXPECT_EQ(reg.match_mode("ACTION_SET_ALARM", "EXTRA_HOUR"), MatchMode::Exact);
  EXPECT_EQ(reg.match_mode("send_email", "subject"), MatchMode::Semantic);
  EXPECT_THROW(reg.set_match_mode("dial", "nope", MatchMode::Semantic), SchemaError);
}

TEST(Registry, DuplicateNameRejected) {
  SchemaRegistry reg;
  auto s = parse_function_source(kAlarmSource);
  reg.add(s);
  try {
    reg.add(s);
    FAIL();
  } catch (const SchemaError& e) {
    EXPECT_EQ(e.kind(), SchemaErrc::DuplicateFunction);
  }
}

TEST(Registry, BundledSourcesAreIdempotent) {
  for (const auto& src : bundled_function_sources()) {
    auto once = parse_function_source(src.text);
    auto twice = deserialize_schema(serialize_schema(once));
    EXPECT_EQ(serialize_schema(twice), serialize_schema(once)) << src.name;
    EXPECT_EQ(once.name, src.name);
  }
}

TEST(Registry, BundledExamplesValidate) {
  auto reg = load_default_registry();
  for (const auto& [name, s] : reg.schemas()) {
    ASSERT_FALSE(s.examples.empty()) << name;
    for (const auto& ex : s.examples) {
      auto plan = parse_code_answer(strip_comments(ex));
      EXPECT_TRUE(validate_plan(plan, reg).empty()) << name << ": " << ex;
      for (const auto& c : plan.calls) EXPECT_EQ(c.name, name);
    }
  }
}

TEST(Registry, SubsetKeepsModes) {
  auto reg = load_default_registry();
  auto sub = reg.subset({"send_email", "dial"});
  EXPECT_EQ(sub.size(), 2u);
  EXPECT_EQ(sub.match_mode("send_email", "subject"), MatchMode::Semantic);
  EXPECT_FALSE(sub.contains("ACTION_SET_ALARM"));
}

TEST(Value, TypeMatching) {
  EXPECT_TRUE(value_matches_type(ArgValue(3), TypeTag::Number));
  EXPECT_FALSE(value_matches_type(ArgValue(3.0), TypeTag::Integer));
  EXPECT_FALSE(value_matches_type(ArgValue("8"), TypeTag::Integer));
  EXPECT_TRUE(value_matches_type(ArgValue(ArgList{1, "a"}), TypeTag::List));
}

TEST(Value, JsonWireForm) {
  EXPECT_EQ(to_json(ArgValue(Ref{3})).get<std::string>(), "#3");
  EXPECT_EQ(arg_from_json(json("#12")), ArgValue(Ref{12}));
  EXPECT_EQ(arg_from_json(json("#1x")), ArgValue("#1x"));
  EXPECT_EQ(arg_from_json(json("#")), ArgValue("#"));
  EXPECT_EQ(literal_from_json(json("#3")), ArgValue("#3"));
  EXPECT_EQ(to_json(ArgValue(8.0)).dump(), "8.0");
  EXPECT_EQ(arg_from_json(json::parse("8.0")), ArgValue(8.0));
  EXPECT_EQ(arg_from_json(json::parse("8")), ArgValue(8));
  EXPECT_THROW(arg_from_json(json(nullptr)), Error);
}

TEST(Value, FloatSpellingRoundTrips) {
  for (double d : {0.1, 1.0 / 3.0, 1e300, -2.5e-8, 12.0, 0.0}) {
    auto s = format_float(d);
    EXPECT_NE(s.find_first_of(".eE"), std::string::npos) << s;
    EXPECT_EQ(std::stod(s), d) << s;
  }
}
