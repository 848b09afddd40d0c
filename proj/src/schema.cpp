#include "droidcall/schema.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "droidcall/code_syntax.hpp"

namespace droidcall {

std::string_view to_string(SchemaErrc kind) {
  switch (kind) {
    case SchemaErrc::MalformedSignature: return "MalformedSignature";
    case SchemaErrc::DocstringMismatch: return "DocstringMismatch";
    case SchemaErrc::DuplicateParam: return "DuplicateParam";
    case SchemaErrc::ParseError: return "ParseError";
    case SchemaErrc::MissingField: return "MissingField";
    case SchemaErrc::InvalidSchema: return "InvalidSchema";
    case SchemaErrc::DuplicateFunction: return "DuplicateFunction";
    case SchemaErrc::UnknownParam: return "UnknownParam";
  }
  return "SchemaError";
}

std::string_view to_string(TypeTag tag) {
  switch (tag) {
    case TypeTag::String: return "string";
    case TypeTag::Integer: return "integer";
    case TypeTag::Number: return "number";
    case TypeTag::Boolean: return "boolean";
    case TypeTag::List: return "list";
    case TypeTag::Map: return "map";
  }
  return "string";
}

std::optional<TypeTag> type_tag_from_string(std::string_view name) {
  if (name == "string") return TypeTag::String;
  if (name == "integer") return TypeTag::Integer;
  if (name == "number") return TypeTag::Number;
  if (name == "boolean") return TypeTag::Boolean;
  if (name == "list") return TypeTag::List;
  if (name == "map") return TypeTag::Map;
  return std::nullopt;
}

std::string_view python_type_name(TypeTag tag) {
  switch (tag) {
    case TypeTag::String: return "str";
    case TypeTag::Integer: return "int";
    case TypeTag::Number: return "float";
    case TypeTag::Boolean: return "bool";
    case TypeTag::List: return "list";
    case TypeTag::Map: return "dict";
  }
  return "str";
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string rtrim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return std::string(s);
}

bool is_identifier(std::string_view s) {
  if (s.empty() || !(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
  return std::all_of(s.begin(), s.end(),
                     [](char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; });
}

// Splits on `sep` at bracket depth zero, outside string literals.
std::vector<std::string_view> split_top_level(std::string_view text, char sep) {
  std::vector<std::string_view> parts;
  int depth = 0;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') --depth;
    else if (c == sep && depth == 0) {
      parts.push_back(text.substr(start, i - start));
      start = i + 1;
    }
  }
  parts.push_back(text.substr(start));
  return parts;
}

// Index of the first top-level `sep`, or npos.
std::size_t find_top_level(std::string_view text, char sep) {
  auto parts = split_top_level(text, sep);
  if (parts.size() == 1) return std::string_view::npos;
  return parts[0].size();
}

std::size_t indent_of(std::string_view line) {
  std::size_t n = 0;
  while (n < line.size() && (line[n] == ' ' || line[n] == '\t')) ++n;
  return n;
}

bool is_blank(std::string_view line) { return trim(line).empty(); }

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::size_t start = 0;
  while (true) {
    auto nl = text.find('\n', start);
    std::string_view line = text.substr(start, nl == std::string_view::npos ? nl : nl - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.emplace_back(line);
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return lines;
}

MatchMode match_mode_from_string(std::string_view s) {
  if (s == "exact") return MatchMode::Exact;
  if (s == "semantic") return MatchMode::Semantic;
  throw SchemaError(SchemaErrc::InvalidSchema, "unknown match mode '" + std::string(s) + "'");
}

struct SignatureParam {
  std::string name;
  std::optional<TypeTag> type;
  bool has_default = false;
  std::optional<ArgValue> default_value;  // empty when the default is None
};

struct DocArg {
  std::string name;
  std::optional<TypeTag> type;
  std::string description;
};

struct Docstring {
  std::string description;
  std::vector<DocArg> args;
  std::optional<std::string> returns_text;
  std::vector<std::string> examples;
};

ArgValue parse_default_literal(std::string_view text, const std::string& param) {
  try {
    syntax::TokenCursor cursor(syntax::tokenize(text));
    ArgValue v = syntax::parse_value(cursor, [&](const syntax::Token& t) -> ArgValue {
      throw SchemaError(SchemaErrc::MalformedSignature,
                        "default of '" + param + "' uses unsupported name '" + t.text + "'");
    });
    if (!cursor.at(syntax::TokenKind::End))
      throw SchemaError(SchemaErrc::MalformedSignature, "trailing text in default of '" + param + "'");
    return v;
  } catch (const PlanError& e) {
    throw SchemaError(SchemaErrc::MalformedSignature,
                      "bad default for '" + param + "': " + std::string(e.what()));
  }
}

std::vector<SignatureParam> parse_params(std::string_view text) {
  std::vector<SignatureParam> params;
  if (trim(text).empty()) return params;
  for (std::string_view raw : split_top_level(text, ',')) {
    std::string_view part = trim(raw);
    if (part.empty()) continue;  // trailing comma
    SignatureParam p;
    std::string_view head = part;
    std::size_t eq = find_top_level(part, '=');
    if (eq != std::string_view::npos) {
      head = trim(part.substr(0, eq));
      std::string_view def = trim(part.substr(eq + 1));
      p.has_default = true;
      if (def.empty()) throw SchemaError(SchemaErrc::MalformedSignature, "empty default value");
      std::string name_guess(trim(head.substr(0, head.find(':'))));
      if (def != "None") p.default_value = parse_default_literal(def, name_guess);
    }
    std::size_t colon = find_top_level(head, ':');
    std::string_view name = trim(head.substr(0, colon));
    if (!is_identifier(name))
      throw SchemaError(SchemaErrc::MalformedSignature, "unsupported parameter '" + std::string(part) + "'");
    p.name = std::string(name);
    if (colon != std::string_view::npos) {
      std::string_view annotation = trim(head.substr(colon + 1));
      p.type = type_tag_from_python(annotation);
      if (!p.type)
        throw SchemaError(SchemaErrc::MalformedSignature,
                          "unsupported annotation '" + std::string(annotation) + "' on '" + p.name + "'");
    }
    params.push_back(std::move(p));
  }
  return params;
}

enum class Section { Description, Args, Returns, Example };

std::optional<Section> section_header(std::string_view line) {
  if (indent_of(line) != 0) return std::nullopt;
  std::string_view t = trim(line);
  if (t == "Args:" || t == "Arguments:") return Section::Args;
  if (t == "Returns:" || t == "Return:") return Section::Returns;
  if (t == "Example:" || t == "Examples:") return Section::Example;
  return std::nullopt;
}

// Strips the common indentation of `lines` (blank lines excluded).
std::vector<std::string> dedent(const std::vector<std::string>& lines) {
  std::size_t common = std::string::npos;
  for (const auto& l : lines) {
    if (!is_blank(l)) common = std::min(common, indent_of(l));
  }
  std::vector<std::string> out;
  for (const auto& l : lines) {
    out.push_back(is_blank(l) ? std::string() : rtrim(std::string_view(l).substr(common)));
  }
  return out;
}

std::string join_block(const std::vector<std::string>& lines) {
  std::size_t b = 0, e = lines.size();
  while (b < e && lines[b].empty()) ++b;
  while (e > b && lines[e - 1].empty()) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) {
    if (i > b) out += '\n';
    out += lines[i];
  }
  return out;
}

std::vector<DocArg> parse_args_section(const std::vector<std::string>& lines) {
  static const std::regex entry(R"(^([A-Za-z_][A-Za-z0-9_]*)\s*(?:\(([^)]*)\))?\s*:\s*(.*)$)");
  std::vector<DocArg> args;
  std::size_t entry_indent = std::string::npos;
  for (const auto& line : lines) {
    if (is_blank(line)) continue;
    std::size_t ind = indent_of(line);
    if (entry_indent == std::string::npos) entry_indent = ind;
    std::string text(trim(line));
    if (ind > entry_indent) {
      if (args.empty())
        throw SchemaError(SchemaErrc::DocstringMismatch, "continuation line before any Args entry");
      auto& desc = args.back().description;
      if (!desc.empty()) desc += ' ';
      desc += text;
      continue;
    }
    if (ind < entry_indent)
      throw SchemaError(SchemaErrc::DocstringMismatch, "misindented Args line: '" + text + "'");
    std::smatch m;
    if (!std::regex_match(text, m, entry))
      throw SchemaError(SchemaErrc::DocstringMismatch, "unparsable Args line: '" + text + "'");
    DocArg arg;
    arg.name = m[1].str();
    if (m[2].matched) {
      std::string type_group = m[2].str();
      auto pieces = split_top_level(type_group, ',');
      std::string_view type_text = trim(pieces.front());
      if (!type_text.empty()) {
        arg.type = type_tag_from_python(type_text);
        if (!arg.type)
          throw SchemaError(SchemaErrc::DocstringMismatch,
                            "unknown type '" + std::string(type_text) + "' for '" + arg.name + "'");
      }
    }
    arg.description = std::string(trim(m[3].str()));
    args.push_back(std::move(arg));
  }
  return args;
}

std::vector<std::string> split_examples(const std::vector<std::string>& lines) {
  std::vector<std::string> chunks;
  std::vector<std::string> current;
  auto flush = [&] {
    std::string block = join_block(dedent(current));
    if (!block.empty()) chunks.push_back(std::move(block));
    current.clear();
  };
  for (const auto& l : lines) {
    if (is_blank(l)) flush();
    else current.push_back(l);
  }
  flush();
  return chunks;
}

Docstring parse_docstring(std::string_view body) {
  auto raw = split_lines(body);
  // The first line sits right after the opening quotes and carries no indent.
  std::vector<std::string> lines;
  std::vector<std::string> rest(raw.begin() + 1, raw.end());
  lines.push_back(std::string(trim(raw.front())));
  for (auto& l : dedent(rest)) lines.push_back(std::move(l));

  Docstring doc;
  Section section = Section::Description;
  std::vector<std::string> description, args, returns, example;
  bool saw_returns = false;
  std::set<Section> seen;
  for (const auto& line : lines) {
    if (auto header = section_header(line)) {
      if (!seen.insert(*header).second)
        throw SchemaError(SchemaErrc::DocstringMismatch, "repeated docstring section '" + line + "'");
      section = *header;
      if (section == Section::Returns) saw_returns = true;
      continue;
    }
    switch (section) {
      case Section::Description: description.push_back(line); break;
      case Section::Args: args.push_back(line); break;
      case Section::Returns: returns.push_back(line); break;
      case Section::Example: example.push_back(line); break;
    }
  }
  doc.description = join_block(description);
  doc.args = parse_args_section(args);
  if (saw_returns) {
    std::string text;
    for (const auto& l : returns) {
      if (is_blank(l)) continue;
      if (!text.empty()) text += ' ';
      text += std::string(trim(l));
    }
    doc.returns_text = text;
  }
  doc.examples = split_examples(example);
  return doc;
}

std::optional<ReturnSpec> build_returns(const std::optional<std::string>& text,
                                        std::optional<TypeTag> annotation, bool annotated_none) {
  if (!text || text->empty() || *text == "None") {
    if (annotation) return ReturnSpec{*annotation, ""};
    return std::nullopt;
  }
  auto colon = find_top_level(*text, ':');
  if (colon != std::string_view::npos) {
    if (auto tag = type_tag_from_python(trim(std::string_view(*text).substr(0, colon)))) {
      if (annotation && *annotation != *tag)
        throw SchemaError(SchemaErrc::DocstringMismatch, "Returns type disagrees with the annotation");
      return ReturnSpec{*tag, std::string(trim(std::string_view(*text).substr(colon + 1)))};
    }
  }
  if (annotation) return ReturnSpec{*annotation, *text};
  if (annotated_none) return std::nullopt;
  throw SchemaError(SchemaErrc::DocstringMismatch, "cannot determine return type from '" + *text + "'");
}

}  // namespace

std::optional<TypeTag> type_tag_from_python(std::string_view annotation) {
  std::string_view a = trim(annotation);
  if (a.rfind("Optional[", 0) == 0 && a.size() > 10 && a.back() == ']')
    return type_tag_from_python(a.substr(9, a.size() - 10));
  auto base = a.substr(0, a.find('['));
  if (base != a && a.back() != ']') return std::nullopt;
  base = trim(base);
  if (base == "str") return TypeTag::String;
  if (base == "int") return TypeTag::Integer;
  if (base == "float") return TypeTag::Number;
  if (base == "bool") return TypeTag::Boolean;
  if (base == "list" || base == "List" || base == "Sequence" || base == "tuple" || base == "Tuple")
    return TypeTag::List;
  if (base == "dict" || base == "Dict" || base == "Mapping") return TypeTag::Map;
  if (base == a) return type_tag_from_string(a);
  return std::nullopt;
}

bool value_matches_type(const ArgValue& value, TypeTag tag) {
  switch (tag) {
    case TypeTag::String: return value.is_string();
    case TypeTag::Integer: return value.is_int();
    case TypeTag::Number: return value.is_int() || value.is_float();
    case TypeTag::Boolean: return value.is_bool();
    case TypeTag::List: return value.is_list();
    case TypeTag::Map: return value.is_map();
  }
  return false;
}

const ParamSpec* FunctionSchema::find_param(std::string_view param) const {
  for (const auto& p : arguments) {
    if (p.name == param) return &p;
  }
  return nullptr;
}

void FunctionSchema::validate() const {
  if (!is_identifier(name)) throw SchemaError(SchemaErrc::InvalidSchema, "invalid function name '" + name + "'");
  if (trim(description).empty())
    throw SchemaError(SchemaErrc::InvalidSchema, "function '" + name + "' has an empty description");
  std::set<std::string_view> seen;
  for (const auto& p : arguments) {
    if (!is_identifier(p.name))
      throw SchemaError(SchemaErrc::InvalidSchema, "invalid parameter name '" + p.name + "'");
    if (!seen.insert(p.name).second)
      throw SchemaError(SchemaErrc::InvalidSchema, "duplicate parameter '" + p.name + "' in " + name);
    if (p.required && p.default_value)
      throw SchemaError(SchemaErrc::InvalidSchema, "required parameter '" + p.name + "' has a default");
    if (p.default_value && (p.default_value->contains_ref() || !value_matches_type(*p.default_value, p.type)))
      throw SchemaError(SchemaErrc::InvalidSchema,
                        "default of '" + p.name + "' does not match type " + std::string(to_string(p.type)));
  }
}

FunctionSchema parse_function_source(std::string_view source) {
  static const std::regex def_re(R"(^\s*def\s+([A-Za-z_][A-Za-z0-9_]*)\s*\()");
  std::string src(source);
  std::smatch m;
  std::size_t def_pos = src.find("def ");
  while (def_pos != std::string::npos && def_pos > 0 && src[def_pos - 1] != '\n') {
    def_pos = src.find("def ", def_pos + 1);
  }
  if (def_pos == std::string::npos)
    throw SchemaError(SchemaErrc::MalformedSignature, "no 'def' header found");
  std::string header_tail = src.substr(def_pos);
  if (!std::regex_search(header_tail, m, def_re))
    throw SchemaError(SchemaErrc::MalformedSignature, "unparsable function header");

  FunctionSchema schema;
  schema.name = m[1].str();
  std::size_t open = def_pos + static_cast<std::size_t>(m.position(0) + m.length(0)) - 1;

  // Matching close paren, string aware.
  int depth = 0;
  char quote = 0;
  std::size_t close = std::string::npos;
  for (std::size_t i = open; i < src.size(); ++i) {
    char c = src[i];
    if (quote) {
      if (c == '\\') ++i;
      else if (c == quote) quote = 0;
      continue;
    }
    if (c == '"' || c == '\'') quote = c;
    else if (c == '(' || c == '[' || c == '{') ++depth;
    else if (c == ')' || c == ']' || c == '}') {
      if (--depth == 0) {
        close = i;
        break;
      }
    }
  }
  if (close == std::string::npos)
    throw SchemaError(SchemaErrc::MalformedSignature, "unbalanced parameter list in '" + schema.name + "'");

  std::size_t colon = src.find(':', close);
  if (colon == std::string::npos)
    throw SchemaError(SchemaErrc::MalformedSignature, "missing ':' after signature of '" + schema.name + "'");
  std::string_view between = trim(std::string_view(src).substr(close + 1, colon - close - 1));
  std::optional<TypeTag> return_annotation;
  bool annotated_none = false;
  if (!between.empty()) {
    if (between.substr(0, 2) != "->")
      throw SchemaError(SchemaErrc::MalformedSignature, "unexpected text after parameter list");
    std::string_view ann = trim(between.substr(2));
    if (ann == "None") {
      annotated_none = true;
    } else {
      return_annotation = type_tag_from_python(ann);
      if (!return_annotation)
        throw SchemaError(SchemaErrc::MalformedSignature, "unsupported return annotation '" + std::string(ann) + "'");
    }
  }

  auto params = parse_params(std::string_view(src).substr(open + 1, close - open - 1));
  {
    std::set<std::string> names;
    for (const auto& p : params) {
      if (!names.insert(p.name).second)
        throw SchemaError(SchemaErrc::DuplicateParam, "parameter '" + p.name + "' appears twice in the signature");
    }
  }

  // Docstring: the first triple-quoted block after the signature.
  std::size_t doc_open = src.find_first_not_of(" \t\r\n", colon + 1);
  if (doc_open == std::string::npos ||
      (src.compare(doc_open, 3, "\"\"\"") != 0 && src.compare(doc_open, 3, "'''") != 0))
    throw SchemaError(SchemaErrc::MalformedSignature, "function '" + schema.name + "' has no docstring");
  std::string delim = src.substr(doc_open, 3);
  std::size_t doc_close = src.find(delim, doc_open + 3);
  if (doc_close == std::string::npos)
    throw SchemaError(SchemaErrc::MalformedSignature, "unterminated docstring in '" + schema.name + "'");
  Docstring doc = parse_docstring(std::string_view(src).substr(doc_open + 3, doc_close - doc_open - 3));

  schema.description = doc.description;
  std::set<std::string> doc_names;
  for (const auto& d : doc.args) {
    if (!doc_names.insert(d.name).second)
      throw SchemaError(SchemaErrc::DuplicateParam, "parameter '" + d.name + "' documented twice");
    bool in_signature = std::any_of(params.begin(), params.end(), [&](const auto& p) { return p.name == d.name; });
    if (!in_signature)
      throw SchemaError(SchemaErrc::DocstringMismatch, "Args documents unknown parameter '" + d.name + "'");
  }

  for (const auto& p : params) {
    ParamSpec spec;
    spec.name = p.name;
    auto doc_it = std::find_if(doc.args.begin(), doc.args.end(), [&](const auto& d) { return d.name == p.name; });
    if (doc_it != doc.args.end()) spec.description = doc_it->description;
    std::optional<TypeTag> doc_type = doc_it != doc.args.end() ? doc_it->type : std::nullopt;
    if (p.type && doc_type && *p.type != *doc_type)
      throw SchemaError(SchemaErrc::DocstringMismatch, "type of '" + p.name + "' differs between signature and Args");
    if (p.type) spec.type = *p.type;
    else if (doc_type) spec.type = *doc_type;
    else throw SchemaError(SchemaErrc::MalformedSignature, "no type given for '" + p.name + "'");
    spec.required = !p.has_default;
    spec.default_value = p.default_value;
    // An integer default for a float parameter is stored as a float.
    if (spec.default_value && spec.type == TypeTag::Number && spec.default_value->is_int())
      spec.default_value = static_cast<double>(spec.default_value->as_int());
    schema.arguments.push_back(std::move(spec));
  }
  schema.returns = build_returns(doc.returns_text, return_annotation, annotated_none);
  schema.examples = doc.examples;
  try {
    schema.validate();
  } catch (const SchemaError& e) {
    throw SchemaError(SchemaErrc::MalformedSignature, e.what());
  }
  return schema;
}

ordered_json schema_to_json(const FunctionSchema& schema) {
  ordered_json j;
  j["name"] = schema.name;
  j["description"] = schema.description;
  ordered_json args = ordered_json::object();
  for (const auto& p : schema.arguments) {
    ordered_json a;
    a["description"] = p.description;
    a["type"] = std::string(to_string(p.type));
    a["required"] = p.required;
    if (p.default_value) a["default"] = to_json(*p.default_value);
    args[p.name] = std::move(a);
  }
  j["arguments"] = std::move(args);
  if (schema.returns) {
    j["returns"] = {{"type", std::string(to_string(schema.returns->type))},
                    {"description", schema.returns->description}};
  }
  if (!schema.examples.empty()) j["example"] = schema.examples;
  return j;
}

namespace {

template <typename Json>
FunctionSchema schema_from_json_impl(const Json& j) {
  if (!j.is_object()) throw SchemaError(SchemaErrc::InvalidSchema, "schema must be a JSON object");
  for (const char* field : {"name", "description", "arguments"}) {
    if (!j.contains(field)) throw SchemaError(SchemaErrc::MissingField, field);
  }
  auto get_string = [](const Json& obj, const char* key, const std::string& where) -> std::string {
    const auto& v = obj.at(key);
    if (!v.is_string())
      throw SchemaError(SchemaErrc::InvalidSchema, std::string(key) + " of " + where + " must be a string");
    return v.template get<std::string>();
  };
  FunctionSchema s;
  s.name = get_string(j, "name", "schema");
  s.description = get_string(j, "description", s.name);
  const auto& args = j.at("arguments");
  if (!args.is_object()) throw SchemaError(SchemaErrc::InvalidSchema, "arguments must be an object");
  for (auto it = args.begin(); it != args.end(); ++it) {
    const auto& a = it.value();
    if (!a.is_object()) throw SchemaError(SchemaErrc::InvalidSchema, "argument '" + it.key() + "' must be an object");
    ParamSpec p;
    p.name = it.key();
    if (!a.contains("type")) throw SchemaError(SchemaErrc::MissingField, "type");
    auto type_text = get_string(a, "type", p.name);
    auto tag = type_tag_from_string(type_text);
    if (!tag) tag = type_tag_from_python(type_text);
    if (!tag) throw SchemaError(SchemaErrc::InvalidSchema, "unknown type '" + type_text + "'");
    p.type = *tag;
    p.description = a.contains("description") ? get_string(a, "description", p.name) : "";
    if (a.contains("required")) {
      const auto& r = a.at("required");
      if (r.is_boolean()) p.required = r.template get<bool>();
      else if (r.is_string() && (r == "true" || r == "false")) p.required = r == "true";
      else throw SchemaError(SchemaErrc::InvalidSchema, "required of '" + p.name + "' must be a boolean");
    } else {
      p.required = !a.contains("default");
    }
    if (a.contains("default") && !a.at("default").is_null()) {
      try {
        p.default_value = literal_from_json(a.at("default"));
      } catch (const std::exception& e) {
        throw SchemaError(SchemaErrc::InvalidSchema, "default of '" + p.name + "': " + e.what());
      }
    }
    s.arguments.push_back(std::move(p));
  }
  if (j.contains("returns") && !j.at("returns").is_null()) {
    const auto& r = j.at("returns");
    if (!r.is_object() || !r.contains("type"))
      throw SchemaError(SchemaErrc::InvalidSchema, "returns must be an object with a type");
    auto type_text = get_string(r, "type", "returns");
    auto tag = type_tag_from_string(type_text);
    if (!tag) tag = type_tag_from_python(type_text);
    if (!tag) throw SchemaError(SchemaErrc::InvalidSchema, "unknown return type '" + type_text + "'");
    s.returns = ReturnSpec{*tag, r.contains("description") ? get_string(r, "description", "returns") : ""};
  }
  if (j.contains("example") && !j.at("example").is_null()) {
    const auto& ex = j.at("example");
    if (ex.is_string()) {
      s.examples.push_back(ex.template get<std::string>());
    } else if (ex.is_array()) {
      for (const auto& e : ex) {
        if (!e.is_string()) throw SchemaError(SchemaErrc::InvalidSchema, "examples must be strings");
        s.examples.push_back(e.template get<std::string>());
      }
    } else {
      throw SchemaError(SchemaErrc::InvalidSchema, "example must be a list of strings");
    }
  }
  s.validate();
  return s;
}

}  // namespace

FunctionSchema schema_from_json(const json& j) { return schema_from_json_impl(j); }
FunctionSchema schema_from_json(const ordered_json& j) { return schema_from_json_impl(j); }

std::string serialize_schema(const FunctionSchema& schema, int indent) {
  return schema_to_json(schema).dump(indent);
}

FunctionSchema deserialize_schema(std::string_view text) {
  ordered_json parsed;
  try {
    parsed = ordered_json::parse(text);
  } catch (const ordered_json::parse_error& e) {
    throw SchemaError(SchemaErrc::ParseError, e.what(), e.byte);
  }
  return schema_from_json(parsed);
}

std::string_view to_string(MatchMode mode) {
  return mode == MatchMode::Semantic ? "semantic" : "exact";
}

void SchemaRegistry::add(FunctionSchema schema) {
  schema.validate();
  if (schemas_.count(schema.name))
    throw SchemaError(SchemaErrc::DuplicateFunction, "function '" + schema.name + "' is already registered");
  std::string name = schema.name;
  schemas_.emplace(std::move(name), std::move(schema));
}

void SchemaRegistry::set_match_mode(std::string_view function, std::string_view param, MatchMode mode) {
  const FunctionSchema* s = find(function);
  if (!s || !s->find_param(param))
    throw SchemaError(SchemaErrc::UnknownParam,
                      "match mode for undeclared parameter " + std::string(function) + "." + std::string(param));
  match_modes_[{std::string(function), std::string(param)}] = mode;
}

MatchMode SchemaRegistry::match_mode(std::string_view function, std::string_view param) const {
  auto it = match_modes_.find({std::string(function), std::string(param)});
  return it == match_modes_.end() ? MatchMode::Exact : it->second;
}

const FunctionSchema* SchemaRegistry::find(std::string_view name) const {
  auto it = schemas_.find(name);
  return it == schemas_.end() ? nullptr : &it->second;
}

std::vector<std::string> SchemaRegistry::names() const {
  std::vector<std::string> out;
  for (const auto& [name, s] : schemas_) out.push_back(name);
  return out;
}

SchemaRegistry SchemaRegistry::subset(const std::vector<std::string>& names) const {
  SchemaRegistry out;
  for (const auto& n : names) {
    const FunctionSchema* s = find(n);
    if (!s) throw SchemaError(SchemaErrc::UnknownParam, "unknown function '" + n + "'");
    if (!out.contains(n)) out.add(*s);
  }
  for (const auto& [key, mode] : match_modes_) {
    if (out.contains(key.first)) out.match_modes_[key] = mode;
  }
  return out;
}

void apply_match_modes(SchemaRegistry& registry, std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw SchemaError(SchemaErrc::ParseError, e.what(), e.byte);
  }
  if (!doc.is_object()) throw SchemaError(SchemaErrc::InvalidSchema, "match modes must be a JSON object");
  for (auto fn = doc.begin(); fn != doc.end(); ++fn) {
    if (!fn.value().is_object())
      throw SchemaError(SchemaErrc::InvalidSchema, "match modes of '" + fn.key() + "' must be an object");
    for (auto p = fn.value().begin(); p != fn.value().end(); ++p) {
      if (!p.value().is_string())
        throw SchemaError(SchemaErrc::InvalidSchema, "match mode must be \"exact\" or \"semantic\"");
      registry.set_match_mode(fn.key(), p.key(), match_mode_from_string(p.value().get<std::string>()));
    }
  }
}

}  // namespace droidcall
