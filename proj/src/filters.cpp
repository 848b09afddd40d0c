#include "droidcall/filters.hpp"

#include <algorithm>
#include <cctype>
#include <set>

namespace droidcall {

std::string_view to_string(RecordErrc kind) {
  switch (kind) {
    case RecordErrc::MissingKey: return "MissingKey";
    case RecordErrc::BadShape: return "BadShape";
    case RecordErrc::UnknownFunction: return "UnknownFunction";
    case RecordErrc::UnknownArgument: return "UnknownArgument";
    case RecordErrc::MissingRequiredArgument: return "MissingRequiredArgument";
    case RecordErrc::BadReference: return "BadReference";
  }
  return "RecordError";
}

std::string_view to_string(RejectReason reason) {
  switch (reason) {
    case RejectReason::NotJson: return "NotJson";
    case RejectReason::BadFormat: return "BadFormat";
    case RejectReason::Duplicate: return "Duplicate";
  }
  return "Rejected";
}

namespace {

RecordCheck reject(RecordErrc kind, std::string detail) {
  return RecordCheck{std::nullopt, RecordRejection{kind, std::move(detail)}};
}

// Checks that `obj` has exactly `keys`; reports the first missing key, then
// the first unexpected one.
std::optional<RecordRejection> check_keys(const json& obj, std::initializer_list<const char*> keys,
                                          const std::string& where) {
  for (const char* k : keys) {
    if (!obj.contains(k)) return RecordRejection{RecordErrc::MissingKey, where + " has no \"" + k + "\""};
  }
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool known = std::any_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; });
    if (!known) return RecordRejection{RecordErrc::BadShape, where + " has unexpected key \"" + it.key() + "\""};
  }
  return std::nullopt;
}

}  // namespace

RecordCheck validate_record(const json& value, const SchemaRegistry& registry) {
  if (!value.is_object()) return reject(RecordErrc::BadShape, "record is not a JSON object");
  if (auto r = check_keys(value, {"query", "answers"}, "record")) return RecordCheck{std::nullopt, *r};
  const auto& query = value.at("query");
  if (!query.is_string() || query.get<std::string>().empty())
    return reject(RecordErrc::BadShape, "\"query\" must be a non-empty string");
  const auto& answers = value.at("answers");
  if (!answers.is_array() || answers.empty())
    return reject(RecordErrc::BadShape, "\"answers\" must be a non-empty array");

  GenerationRecord record;
  record.query = query.get<std::string>();
  for (std::size_t pos = 0; pos < answers.size(); ++pos) {
    const auto& item = answers[pos];
    std::string where = "answer " + std::to_string(pos);
    if (!item.is_object()) return reject(RecordErrc::BadShape, where + " is not an object");
    if (auto r = check_keys(item, {"id", "name", "arguments"}, where)) return RecordCheck{std::nullopt, *r};
    const auto& id = item.at("id");
    if (!id.is_number_integer() || id.get<std::int64_t>() != static_cast<std::int64_t>(pos))
      return reject(RecordErrc::BadShape, where + " must have id " + std::to_string(pos));
    if (!item.at("name").is_string()) return reject(RecordErrc::BadShape, where + " name is not a string");
    if (!item.at("arguments").is_object())
      return reject(RecordErrc::BadShape, where + " arguments is not an object");

    FunctionCall call;
    call.id = pos;
    call.name = item.at("name").get<std::string>();
    const FunctionSchema* schema = registry.find(call.name);
    if (!schema) return reject(RecordErrc::UnknownFunction, "unknown function " + call.name);

    const auto& args = item.at("arguments");
    for (auto it = args.begin(); it != args.end(); ++it) {
      if (!schema->find_param(it.key()))
        return reject(RecordErrc::UnknownArgument, call.name + " has no argument '" + it.key() + "'");
      ArgValue v;
      try {
        v = arg_from_json(it.value());
      } catch (const std::exception& e) {
        return reject(RecordErrc::BadShape, call.name + "." + it.key() + ": " + e.what());
      }
      std::optional<RecordRejection> bad_ref;
      v.for_each_ref([&](Ref r) {
        if (!bad_ref && r.id >= pos)
          bad_ref = RecordRejection{RecordErrc::BadReference,
                                    where + " references #" + std::to_string(r.id) + " which does not precede it"};
      });
      if (bad_ref) return RecordCheck{std::nullopt, *bad_ref};
      call.arguments.emplace(it.key(), std::move(v));
    }
    for (const auto& p : schema->arguments) {
      if (p.required && !call.arguments.count(p.name))
        return reject(RecordErrc::MissingRequiredArgument, call.name + " is missing '" + p.name + "'");
    }
    record.answers.calls.push_back(std::move(call));
  }
  return RecordCheck{std::move(record), std::nullopt};
}

namespace {

// UTF-8 length of a whitespace code point starting at s[i], or 0.
std::size_t whitespace_len(std::string_view s, std::size_t i) {
  auto b = [&](std::size_t k) { return i + k < s.size() ? static_cast<unsigned char>(s[i + k]) : 0u; };
  unsigned c0 = b(0);
  if (c0 == ' ' || (c0 >= 0x09 && c0 <= 0x0d)) return 1;
  if (c0 == 0xc2 && (b(1) == 0x85 || b(1) == 0xa0)) return 2;
  if (c0 == 0xe1 && b(1) == 0x9a && b(2) == 0x80) return 3;  // U+1680
  if (c0 == 0xe2 && b(1) == 0x80) {
    unsigned c2 = b(2);
    if ((c2 >= 0x80 && c2 <= 0x8a) || c2 == 0xa8 || c2 == 0xa9 || c2 == 0xaf) return 3;
  }
  if (c0 == 0xe2 && b(1) == 0x81 && b(2) == 0x9f) return 3;  // U+205F
  if (c0 == 0xe3 && b(1) == 0x80 && b(2) == 0x80) return 3;  // U+3000
  return 0;
}

bool is_punct(char c) { return std::ispunct(static_cast<unsigned char>(c)) != 0; }

}  // namespace

TokenSeq tokenize_query(std::string_view text) {
  TokenSeq out;
  std::string current;
  auto flush = [&] {
    std::size_t b = 0, e = current.size();
    while (b < e && is_punct(current[b])) ++b;
    while (e > b && is_punct(current[e - 1])) --e;
    if (e > b) out.push_back(current.substr(b, e - b));
    current.clear();
  };
  for (std::size_t i = 0; i < text.size();) {
    if (std::size_t w = whitespace_len(text, i)) {
      flush();
      i += w;
      continue;
    }
    current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(text[i]))));
    ++i;
  }
  flush();
  return out;
}

std::size_t lcs_length(const TokenSeq& a, const TokenSeq& b) {
  if (a.empty() || b.empty()) return 0;
  std::vector<std::size_t> prev(b.size() + 1, 0), cur(b.size() + 1, 0);
  for (std::size_t i = 1; i <= a.size(); ++i) {
    for (std::size_t j = 1; j <= b.size(); ++j) {
      cur[j] = a[i - 1] == b[j - 1] ? prev[j - 1] + 1 : std::max(prev[j], cur[j - 1]);
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

double rouge_l_f(const TokenSeq& candidate, const TokenSeq& reference) {
  double l = static_cast<double>(lcs_length(candidate, reference));
  double p = candidate.empty() ? 0.0 : l / static_cast<double>(candidate.size());
  double r = reference.empty() ? 0.0 : l / static_cast<double>(reference.size());
  if (p + r == 0.0) return 0.0;
  return 2.0 * p * r / (p + r);
}

double max_similarity(const TokenSeq& tokens, const SimilarityState& state) {
  double best = 0.0;
  for (const auto& q : state.accepted_queries) best = std::max(best, rouge_l_f(tokens, q));
  return best;
}

FilterDecision similarity_filter_step(const GenerationRecord& record, SimilarityState& state) {
  TokenSeq tokens = tokenize_query(record.query);
  for (const auto& q : state.accepted_queries) {
    if (rouge_l_f(tokens, q) >= state.threshold) return FilterDecision::Drop;
  }
  state.accepted_queries.push_back(std::move(tokens));
  return FilterDecision::Keep;
}

FilterOutcome run_filter_chain(std::string_view raw, const SchemaRegistry& registry,
                               SimilarityState& state) {
  FilterOutcome outcome;
  auto values = extract_json_values(raw);
  if (values.empty()) {
    if (raw.find_first_not_of(" \t\r\n") != std::string_view::npos)
      outcome.rejected.push_back({RejectReason::NotJson, std::string(raw), "no JSON value found"});
    return outcome;
  }
  for (const auto& v : values) {
    auto check = validate_record(v, registry);
    if (!check.accepted()) {
      outcome.rejected.push_back({RejectReason::BadFormat, v.dump(),
                                  std::string(to_string(check.rejection->kind)) + ": " + check.rejection->detail});
      continue;
    }
    if (similarity_filter_step(*check.record, state) == FilterDecision::Drop) {
      outcome.rejected.push_back({RejectReason::Duplicate, v.dump(), "similar to an accepted query"});
      continue;
    }
    outcome.accepted.push_back(std::move(*check.record));
  }
  return outcome;
}

std::string rejections_to_jsonl(const std::vector<Rejection>& rejections) {
  std::string out;
  for (const auto& r : rejections) {
    ordered_json j;
    j["reason"] = to_string(r.reason);
    j["raw"] = r.raw;
    j["detail"] = r.detail;
    out += j.dump(-1, ' ', false, json::error_handler_t::replace) + "\n";
  }
  return out;
}

}  // namespace droidcall
