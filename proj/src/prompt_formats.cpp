#include "droidcall/prompt_formats.hpp"

#include <charconv>
#include <set>

#include "droidcall/io.hpp"

namespace droidcall {

std::string_view to_string(PromptFormat format) {
  switch (format) {
    case PromptFormat::Json: return "json";
    case PromptFormat::Code: return "code";
    case PromptFormat::JsonShort: return "json_short";
    case PromptFormat::CodeShort: return "code_short";
  }
  return "json";
}

std::optional<PromptFormat> prompt_format_from_string(std::string_view name) {
  for (auto f : {PromptFormat::Json, PromptFormat::Code, PromptFormat::JsonShort, PromptFormat::CodeShort}) {
    if (to_string(f) == name) return f;
  }
  return std::nullopt;
}

bool is_code(PromptFormat format) { return format == PromptFormat::Code || format == PromptFormat::CodeShort; }
bool is_short(PromptFormat format) {
  return format == PromptFormat::JsonShort || format == PromptFormat::CodeShort;
}

std::string_view to_string(FormatErrc kind) {
  switch (kind) {
    case FormatErrc::NoFunctions: return "NoFunctions";
    case FormatErrc::UnknownFunction: return "UnknownFunction";
    case FormatErrc::EmptyField: return "EmptyField";
  }
  return "FormatError";
}

namespace {

constexpr std::string_view kSystemFull =
    "You are an expert in composing functions. You are given a query and a set of possible functions.\n"
    "Based on the query, you will need to make one or more function calls to achieve the purpose.\n"
    "If none of the function can be used, point it out. If the given question lacks the parameters required "
    "by the function,\n"
    "also point it out. Remember you should not use functions that is not suitable for the query and only "
    "return the function call in tools call sections.";

constexpr std::string_view kSystemShort = "You are an expert in composing functions.";

constexpr std::string_view kJsonFormatDescription = R"([
    {
      "id": 0,
      "name": "func0",
      "arguments": {
          "arg1": "value1",
          "arg2": "value2",
          ...
      }
    },
    {
      "id": 1,
      "name": "func1",
      "arguments": {
          "arg1": "value1",
          "arg2": "value2",
          ...
      }
    },
    ...
]
If an argument is a response from a previous function call, 
you can reference it in the following way like the argument 
value of arg2 in func1:
[
    {
      "id": 0,
      "name": "func0",
      "arguments": {
          "arg1": "value1",
          "arg2": "value2",
          ...
      }
    },
    {
      "id": 1,
      "name": "func1",
      "arguments": {
          "arg1": "value1",
          "arg2": "#0",
          ...
      }
    },
    ...
]
This means that the value of arg2 in func1 is the return 
value from func0 (#0 means the response from the function call with id 0).)";

constexpr std::string_view kCodeFormatDescription =
    R"(result1 = func0(arg1="value1", arg2="value2", ...)
result2 = func1(arg1="value1", arg2=result1, ...)
...
You can do nested function calling in the following way:
result1 = func0(arg1="value1", arg2="value2", ...)
result2 = func1(arg1="value1", arg2=result1, ...)
...
This means that the value of arg2 in func1 is the return value from func0.)";

constexpr std::string_view kClosingInstruction =
    "If there is a way to achieve the purpose using the given functions, please provide the function call(s) "
    "in the above format.\n"
    "REMEMBER TO ONLY RETURN THE FUNCTION CALLS LIKE THE EXAMPLE ABOVE, NO OTHER INFORMATION SHOULD BE "
    "RETURNED.";

// First line gets `indent`; later lines are kept as written.
std::string indent_first(std::string_view text, std::string_view indent) {
  return std::string(indent) + std::string(text);
}

// Every line gets `indent` after the first, which gets `first`.
std::string hang(std::string_view text, std::string_view first, std::string_view rest) {
  std::string out(first);
  for (char c : text) {
    out += c;
    if (c == '\n') out += rest;
  }
  return out;
}

std::string type_label(const ParamSpec& p) {
  std::string t(python_type_name(p.type));
  if (!p.required) t += ", optional";
  return t;
}

std::string render_code_doc(const FunctionSchema& s) {
  std::string out = "Name:\n    " + s.name + "\nDescription:\n" + indent_first(s.description, "    ") + "\nArgs:\n";
  if (s.arguments.empty()) out += "    None\n";
  for (const auto& p : s.arguments) {
    std::string line = p.name + " (" + type_label(p) + "):";
    if (!p.description.empty()) line += " " + p.description;
    out += hang(line, "    ", "        ") + "\n";
  }
  out += "Returns:\n";
  if (s.returns) {
    std::string line(python_type_name(s.returns->type));
    line += ":";
    if (!s.returns->description.empty()) line += " " + s.returns->description;
    out += hang(line, "    ", "        ");
  } else {
    out += "    None";
  }
  if (!s.examples.empty()) {
    std::string joined;
    for (const auto& e : s.examples) {
      if (!joined.empty()) joined += "\n\n";
      joined += e;
    }
    out += "\nExample:\n" + indent_first(joined, "    ");
  }
  return out;
}

std::string render_functions(const std::vector<FunctionSchema>& functions, PromptFormat format) {
  std::string out;
  for (const auto& f : functions) {
    if (!out.empty()) out += "\n";
    out += render_function_doc(f, format);
  }
  return out;
}

std::string render_fewshot(const std::vector<FewshotExample>& fewshot, PromptFormat format,
                           const Separator& separator) {
  std::string out;
  for (const auto& ex : fewshot) {
    if (!out.empty()) out += "\n\n";
    out += "Example:\nquery: " + ex.query + "\nanswers:\n" + render_answer(ex.answers, format, separator);
  }
  return out;
}

}  // namespace

ordered_json chat_sample_to_json(const ChatSample& sample) {
  ordered_json j;
  j["system"] = sample.system;
  j["user"] = sample.user;
  j["assistant"] = sample.assistant;
  return j;
}

ChatSample chat_sample_from_json(const json& j) {
  ChatSample s;
  for (auto [key, field] : {std::pair{"system", &s.system}, {"user", &s.user}, {"assistant", &s.assistant}}) {
    if (!j.is_object() || !j.contains(key) || !j.at(key).is_string())
      throw FormatError(FormatErrc::EmptyField, std::string("chat sample needs a string \"") + key + "\"");
    *field = j.at(key).get<std::string>();
  }
  return s;
}

std::string render_function_doc(const FunctionSchema& schema, PromptFormat format) {
  if (is_code(format)) return render_code_doc(schema);
  return serialize_schema(schema, 4);
}

PromptText render_eval_prompt(PromptFormat format, const std::vector<FunctionSchema>& functions,
                              std::string_view query, const std::vector<FewshotExample>& fewshot,
                              const Separator& separator) {
  if (functions.empty()) throw FormatError(FormatErrc::NoFunctions, "a prompt needs at least one function");
  std::string docs = render_functions(functions, format);
  PromptText out;
  if (is_short(format)) {
    out.system = std::string(kSystemShort);
    out.user = "Here is a list of functions:\n" + docs + "\n\nNow my query is: " + std::string(query);
    return out;
  }
  out.system = std::string(kSystemFull);
  out.user = "Here is a list of functions that you can invoke:\n" + docs +
             "\n\nShould you decide to return the function call(s), Put it in the format of\n" +
             std::string(is_code(format) ? kCodeFormatDescription : kJsonFormatDescription) + "\n\n";
  if (!fewshot.empty()) out.user += render_fewshot(fewshot, format, separator) + "\n\n";
  out.user += std::string(kClosingInstruction) + "\n\nNow my query is: " + std::string(query);
  return out;
}

std::string render_answer(const CallPlan& plan, PromptFormat format, const Separator& separator) {
  if (is_code(format)) return separator.open + render_code_calls(plan) + separator.close;
  return plan_to_json(plan).dump(4);
}

CallPlan parse_answer(std::string_view text, PromptFormat format, const Separator& separator) {
  if (is_code(format)) return parse_code_answer(text, separator);
  try {
    return parse_json_answer(text);
  } catch (const PlanError& e) {
    if (e.kind() != PlanErrc::NotJson) throw;
    // Tolerate prose around the array: take the first array in the text.
    std::string_view rest = text;
    while (true) {
      auto open = rest.find('[');
      if (open == std::string_view::npos) throw;
      std::size_t depth = 0, end = std::string_view::npos;
      bool in_string = false;
      for (std::size_t i = open; i < rest.size(); ++i) {
        char c = rest[i];
        if (in_string) {
          if (c == '\\') ++i;
          else if (c == '"') in_string = false;
          continue;
        }
        if (c == '"') in_string = true;
        else if (c == '[' || c == '{') ++depth;
        else if (c == ']' || c == '}') {
          if (depth == 0) break;
          if (--depth == 0) {
            end = i + 1;
            break;
          }
        }
      }
      if (end != std::string_view::npos) {
        json arr = json::parse(rest.substr(open, end - open), nullptr, false);
        if (!arr.is_discarded() && arr.is_array()) return plan_from_json(arr);
      }
      rest.remove_prefix(open + 1);
    }
  }
}

std::vector<FunctionSchema> record_functions(const GenerationRecord& record, const SchemaRegistry& registry) {
  std::vector<FunctionSchema> out;
  std::set<std::string, std::less<>> seen;
  for (const auto& c : record.answers.calls) {
    if (!seen.insert(c.name).second) continue;
    const FunctionSchema* s = registry.find(c.name);
    if (!s) throw FormatError(FormatErrc::UnknownFunction, "function '" + c.name + "' is not registered");
    out.push_back(*s);
  }
  return out;
}

ChatSample render_training_sample(const GenerationRecord& record, PromptFormat format,
                                  const SchemaRegistry& registry, const Separator& separator) {
  if (record.query.empty()) throw FormatError(FormatErrc::EmptyField, "record query is empty");
  if (record.answers.empty()) throw FormatError(FormatErrc::EmptyField, "record has no answers");
  auto prompt = render_eval_prompt(format, record_functions(record, registry), record.query, {}, separator);
  return ChatSample{std::move(prompt.system), std::move(prompt.user), render_answer(record.answers, format, separator)};
}

TokenizerHandle whitespace_tokenizer() {
  return TokenizerHandle{"whitespace", [](std::string_view text) {
                           std::size_t n = 0;
                           bool in_token = false;
                           for (char c : text) {
                             bool space = c == ' ' || c == '\n' || c == '\t' || c == '\r' || c == '\f' || c == '\v';
                             if (!space && !in_token) ++n;
                             in_token = !space;
                           }
                           return n;
                         }};
}

TokenizerHandle command_tokenizer(const std::string& command) {
  return TokenizerHandle{"command:" + command, [command](std::string_view text) -> std::size_t {
                           if (text.empty()) return 0;
                           std::string out = run_command(command, text);
                           auto b = out.find_first_not_of(" \t\r\n");
                           auto e = out.find_last_not_of(" \t\r\n");
                           std::size_t n = 0;
                           if (b == std::string::npos) throw IoError("tokenizer '" + command + "' printed nothing");
                           auto [ptr, ec] = std::from_chars(out.data() + b, out.data() + e + 1, n);
                           if (ec != std::errc() || ptr != out.data() + e + 1)
                             throw IoError("tokenizer '" + command + "' printed a non-integer");
                           return n;
                         }};
}

TokenStats token_stats(const std::vector<GenerationRecord>& dataset, PromptFormat format,
                       const TokenizerHandle& tokenizer, const SchemaRegistry& registry) {
  TokenStats stats;
  double total = 0.0;
  for (const auto& r : dataset) {
    auto prompt = render_eval_prompt(format, record_functions(r, registry), r.query);
    std::size_t n = tokenizer.count(prompt.system + "\n" + prompt.user);
    stats.per_sample.push_back(n);
    total += static_cast<double>(n);
  }
  if (!dataset.empty()) stats.mean = total / static_cast<double>(dataset.size());
  return stats;
}

FinetuneConfig export_finetune_config() { return FinetuneConfig{}; }

ordered_json finetune_config_to_json(const FinetuneConfig& c) {
  ordered_json j;
  j["lora_rank"] = c.lora_rank;
  j["lora_alpha"] = c.lora_alpha;
  j["learning_rate"] = c.learning_rate;
  j["warmup_ratio"] = c.warmup_ratio;
  j["epochs"] = c.epochs;
  j["scheduler"] = c.scheduler;
  return j;
}

FinetuneConfig finetune_config_from_json(const json& j) {
  FinetuneConfig c;
  c.lora_rank = j.at("lora_rank").get<int>();
  c.lora_alpha = j.at("lora_alpha").get<int>();
  c.learning_rate = j.at("learning_rate").get<double>();
  c.warmup_ratio = j.at("warmup_ratio").get<double>();
  c.epochs = j.at("epochs").get<int>();
  c.scheduler = j.at("scheduler").get<std::string>();
  return c;
}

}  // namespace droidcall
