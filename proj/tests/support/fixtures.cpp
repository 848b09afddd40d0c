#include "fixtures.hpp"

#include <algorithm>
#include <set>

namespace droidcall::testing {

namespace {

const std::vector<std::string>& vocabulary() {
  static const std::vector<std::string> words = {
      "alarm",   "morning", "remind",  "meeting", "office", "dinner",  "call",    "mom",     "tomorrow",
      "weekly",  "report",  "coffee",  "gym",     "friday", "monday",  "lunch",   "doctor",  "flight",
      "hotel",   "book",    "share",   "photo",   "beach",  "sunset",  "team",    "standup", "project",
      "budget",  "review",  "garden",  "water",   "plants", "pizza",   "order",   "movie",   "ticket",
      "train",   "station", "airport", "bakery",  "piano",  "lesson",  "yoga",    "class",   "river",
      "bridge",  "museum",  "concert", "laptop",  "charger", "battery", "network", "weather", "forecast",
      "recipe",  "pasta",   "salad",   "soccer",  "match",  "score",   "library", "novel",   "poem",
      "school",  "teacher", "invoice", "bank",    "market", "apples",  "bread",   "cheese",  "wine",
      "holiday", "party",   "gift",    "card",    "letter", "package", "courier", "parcel",  "stamp"};
  return words;
}

std::string hard_string(Rng& rng) {
  static const std::vector<std::string> parts = {
      "plain",  "with \"quotes\"", "back\\slash", "tab\there", "new\nline", "caf\xC3\xA9", "\xE2\x9C\x93 done",
      "#1x",    "result1",         "a, b",        "(paren)",   "[bracket]", "{brace}",    "it's",
      "=equal", "  spaced  ",      "",            "#"};
  std::uniform_int_distribution<std::size_t> pick(0, parts.size() - 1);
  std::string s = parts[pick(rng)];
  if (rng() % 2) s += " " + parts[pick(rng)];
  return s;
}

ArgValue nested_value(Rng& rng, int depth) {
  switch (rng() % (depth > 1 ? 5 : 7)) {
    case 0: return ArgValue(static_cast<std::int64_t>(rng() % 2001) - 1000);
    case 1: {
      double d = std::uniform_real_distribution<double>(-1e6, 1e6)(rng);
      if (rng() % 3 == 0) d = static_cast<double>(static_cast<std::int64_t>(d));  // 12.0 must stay a float
      return ArgValue(d);
    }
    case 2: return ArgValue(rng() % 2 == 0);
    case 3: return ArgValue(hard_string(rng));
    case 4: return ArgValue(random_words(rng, 1, 2));
    case 5: {
      ArgList l;
      for (std::size_t i = rng() % 3; i > 0; --i) l.push_back(nested_value(rng, depth + 1));
      return ArgValue(std::move(l));
    }
    default: {
      ArgMap m;
      for (std::size_t i = rng() % 3; i > 0; --i) m["k" + std::to_string(rng() % 5)] = nested_value(rng, depth + 1);
      return ArgValue(std::move(m));
    }
  }
}

}  // namespace

std::string random_words(Rng& rng, std::size_t min_words, std::size_t max_words) {
  const auto& words = vocabulary();
  std::size_t n = min_words + rng() % (max_words - min_words + 1);
  std::string out;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) out += ' ';
    out += words[rng() % words.size()];
  }
  return out;
}

ArgValue random_value(Rng& rng, TypeTag type, bool hard_strings) {
  switch (type) {
    case TypeTag::String: return hard_strings && rng() % 2 ? ArgValue(hard_string(rng)) : ArgValue(random_words(rng, 1, 3));
    case TypeTag::Integer: return ArgValue(static_cast<std::int64_t>(rng() % 60));
    case TypeTag::Number: return ArgValue(static_cast<double>(rng() % 1000) / 8.0);
    case TypeTag::Boolean: return ArgValue(rng() % 2 == 0);
    case TypeTag::List: {
      ArgList l;
      for (std::size_t i = 1 + rng() % 2; i > 0; --i) l.push_back(random_value(rng, TypeTag::String, hard_strings));
      return ArgValue(std::move(l));
    }
    case TypeTag::Map: {
      ArgMap m;
      m["key"] = random_value(rng, TypeTag::String, hard_strings);
      return ArgValue(std::move(m));
    }
  }
  return {};
}

FunctionCall random_call(Rng& rng, const FunctionSchema& schema, std::size_t id, bool hard_strings,
                         std::size_t min_args) {
  FunctionCall call;
  call.id = id;
  call.name = schema.name;
  std::vector<const ParamSpec*> optional;
  for (const auto& p : schema.arguments) {
    if (p.required) call.arguments[p.name] = random_value(rng, p.type, hard_strings);
    else optional.push_back(&p);
  }
  std::shuffle(optional.begin(), optional.end(), rng);
  std::size_t extra = optional.empty() ? 0 : rng() % (optional.size() + 1);
  if (call.arguments.size() + extra < min_args) extra = std::min(optional.size(), min_args - call.arguments.size());
  for (std::size_t i = 0; i < extra; ++i) call.arguments[optional[i]->name] = random_value(rng, optional[i]->type, hard_strings);
  return call;
}

CallPlan random_plan(Rng& rng, const SchemaRegistry& registry, const PlanShape& shape) {
  auto names = registry.names();
  CallPlan plan;
  std::size_t n = shape.min_calls + rng() % (shape.max_calls - shape.min_calls + 1);
  std::bernoulli_distribution use_ref(shape.ref_probability);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& schema = *registry.find(names[rng() % names.size()]);
    auto call = random_call(rng, schema, i, shape.hard_strings);
    for (auto& [arg, value] : call.arguments) {
      const ParamSpec* spec = schema.find_param(arg);
      if (i > 0 && spec->type == TypeTag::String && use_ref(rng)) value = Ref{rng() % i};
      if (spec->type == TypeTag::List && shape.nested_lists) {
        ArgList l;
        for (std::size_t k = rng() % 4; k > 0; --k) {
          if (i > 0 && use_ref(rng)) l.push_back(Ref{rng() % i});
          else l.push_back(nested_value(rng, 0));
        }
        value = ArgValue(std::move(l));
      }
    }
    plan.calls.push_back(std::move(call));
  }
  return plan;
}

std::vector<GenerationRecord> fixture_testset(const SchemaRegistry& registry, std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<const FunctionSchema*> with_params, all;
  for (const auto& [name, s] : registry.schemas()) {
    all.push_back(&s);
    if (!s.arguments.empty()) with_params.push_back(&s);
  }
  std::vector<GenerationRecord> out;
  std::set<std::string> queries;
  while (out.size() < n) {
    GenerationRecord r;
    r.query = "please " + random_words(rng, 4, 9) + " " + std::to_string(out.size());
    if (!queries.insert(r.query).second) continue;
    std::size_t calls = 1 + rng() % 3;
    for (std::size_t i = 0; i < calls; ++i) {
      const FunctionSchema& s = i == 0 ? *with_params[rng() % with_params.size()] : *all[rng() % all.size()];
      auto call = random_call(rng, s, i, false, i == 0 ? 1 : 0);
      // Occasionally feed an earlier result into a string argument.
      if (i > 0 && rng() % 4 == 0) {
        for (auto& [arg, value] : call.arguments) {
          if (value.is_string()) {
            value = Ref{rng() % i};
            break;
          }
        }
      }
      r.answers.calls.push_back(std::move(call));
    }
    out.push_back(std::move(r));
  }
  return out;
}

GenerationRecord alarm_record() {
  GenerationRecord r;
  r.query = "Wake me up at 8:30";
  r.answers.calls.push_back({0, "ACTION_SET_ALARM", {{"EXTRA_HOUR", 8}, {"EXTRA_MINUTE", 30}}});
  return r;
}

GenerationRecord timer_and_dial_record() {
  GenerationRecord r;
  r.query = "Set a timer for 30 minutes and dial 123456";
  r.answers.calls.push_back({0, "ACTION_SET_TIMER", {{"duration", "30 minutes"}}});
  r.answers.calls.push_back({1, "dial", {{"phone_number", "123456"}}});
  return r;
}

}  // namespace droidcall::testing
