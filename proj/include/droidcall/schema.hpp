#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "droidcall/errors.hpp"
#include "droidcall/value.hpp"

namespace droidcall {

enum class SchemaErrc {
  MalformedSignature,
  DocstringMismatch,
  DuplicateParam,
  ParseError,
  MissingField,
  InvalidSchema,
  DuplicateFunction,
  UnknownParam,
};

std::string_view to_string(SchemaErrc kind);

class SchemaError : public KindError<SchemaErrc> {
 public:
  SchemaError(SchemaErrc kind, const std::string& detail, std::size_t byte_offset = 0)
      : KindError(kind, detail), byte_offset_(byte_offset) {}

  // Offset into the input for ParseError, 0 otherwise.
  std::size_t byte_offset() const noexcept { return byte_offset_; }

 private:
  std::size_t byte_offset_;
};

enum class TypeTag { String, Integer, Number, Boolean, List, Map };

std::string_view to_string(TypeTag tag);
std::optional<TypeTag> type_tag_from_string(std::string_view name);

// Python annotation spelling used in function sources and code-style docs.
std::string_view python_type_name(TypeTag tag);
std::optional<TypeTag> type_tag_from_python(std::string_view annotation);

// Whether a literal (not a Ref) satisfies a declared type. Integers are
// accepted where a number is declared.
bool value_matches_type(const ArgValue& value, TypeTag tag);

struct ParamSpec {
  std::string name;
  std::string description;
  TypeTag type = TypeTag::String;
  bool required = true;
  std::optional<ArgValue> default_value;

  friend bool operator==(const ParamSpec&, const ParamSpec&) = default;
};

struct ReturnSpec {
  TypeTag type = TypeTag::String;
  std::string description;

  friend bool operator==(const ReturnSpec&, const ReturnSpec&) = default;
};

struct FunctionSchema {
  std::string name;
  std::string description;
  std::vector<ParamSpec> arguments;  // declaration order
  std::optional<ReturnSpec> returns;
  std::vector<std::string> examples;

  const ParamSpec* find_param(std::string_view param) const;

  // Throws SchemaError(InvalidSchema) when an invariant is broken: empty name
  // or description, duplicate argument names, a required parameter with a
  // default, or a default whose type disagrees with the declared type.
  void validate() const;

  friend bool operator==(const FunctionSchema&, const FunctionSchema&) = default;
};

// Parses one Python-style function definition with a Google-style docstring.
FunctionSchema parse_function_source(std::string_view source);

// JSON layout:
// {"name", "description", "arguments": {arg: {"description", "type",
//  "required", "default"?}}, "returns"?: {"type", "description"}, "example"?: [..]}
ordered_json schema_to_json(const FunctionSchema& schema);
FunctionSchema schema_from_json(const json& j);  // argument order becomes alphabetical
FunctionSchema schema_from_json(const ordered_json& j);
std::string serialize_schema(const FunctionSchema& schema, int indent = 4);
FunctionSchema deserialize_schema(std::string_view text);

enum class MatchMode { Exact, Semantic };

std::string_view to_string(MatchMode mode);

// Immutable-after-load set of function schemas, keyed and ordered by name.
class SchemaRegistry {
 public:
  // Throws SchemaError(DuplicateFunction) on a repeated name.
  void add(FunctionSchema schema);

  // Throws SchemaError(UnknownParam) if the pair does not name a declared param.
  void set_match_mode(std::string_view function, std::string_view param, MatchMode mode);
  MatchMode match_mode(std::string_view function, std::string_view param) const;
  const std::map<std::pair<std::string, std::string>, MatchMode>& match_modes() const {
    return match_modes_;
  }

  const FunctionSchema* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::size_t size() const { return schemas_.size(); }
  bool empty() const { return schemas_.empty(); }
  std::vector<std::string> names() const;
  const std::map<std::string, FunctionSchema, std::less<>>& schemas() const { return schemas_; }

  // Registry restricted to `names`, keeping their match modes.
  SchemaRegistry subset(const std::vector<std::string>& names) const;

 private:
  std::map<std::string, FunctionSchema, std::less<>> schemas_;
  std::map<std::pair<std::string, std::string>, MatchMode> match_modes_;
};

struct BundledSource {
  std::string_view name;
  std::string_view text;
};

// The 24 function sources compiled into the library.
const std::vector<BundledSource>& bundled_function_sources();
std::string_view bundled_match_modes();

SchemaRegistry load_default_registry();

// Reads `<dir>/*.src` and the optional `<dir>/match_modes.json`.
SchemaRegistry load_registry_dir(const std::filesystem::path& dir);

// Applies a {"function": {"param": "exact"|"semantic"}} document.
void apply_match_modes(SchemaRegistry& registry, std::string_view json_text);

}  // namespace droidcall
