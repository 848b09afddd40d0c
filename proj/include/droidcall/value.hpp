#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

namespace droidcall {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

// Reference to the result of another call in the same plan, by call id.
struct Ref {
  std::size_t id = 0;
  friend auto operator<=>(const Ref&, const Ref&) = default;
};

class ArgValue;
using ArgList = std::vector<ArgValue>;
using ArgMap = std::map<std::string, ArgValue, std::less<>>;

enum class ValueKind { String, Int, Float, Bool, List, Map, Ref };

std::string_view to_string(ValueKind kind);

// A literal argument value, or a reference to another call's result.
class ArgValue {
 public:
  using Storage = std::variant<std::string, std::int64_t, double, bool, ArgList, ArgMap, Ref>;

  ArgValue() : storage_(std::string{}) {}
  ArgValue(std::string s) : storage_(std::move(s)) {}
  ArgValue(const char* s) : storage_(std::string(s)) {}
  ArgValue(std::int64_t i) : storage_(i) {}
  ArgValue(int i) : storage_(static_cast<std::int64_t>(i)) {}
  ArgValue(double d) : storage_(d) {}
  ArgValue(bool b) : storage_(b) {}
  ArgValue(ArgList l) : storage_(std::move(l)) {}
  ArgValue(ArgMap m) : storage_(std::move(m)) {}
  ArgValue(Ref r) : storage_(r) {}

  ValueKind kind() const noexcept { return static_cast<ValueKind>(storage_.index()); }

  bool is_string() const noexcept { return kind() == ValueKind::String; }
  bool is_int() const noexcept { return kind() == ValueKind::Int; }
  bool is_float() const noexcept { return kind() == ValueKind::Float; }
  bool is_bool() const noexcept { return kind() == ValueKind::Bool; }
  bool is_list() const noexcept { return kind() == ValueKind::List; }
  bool is_map() const noexcept { return kind() == ValueKind::Map; }
  bool is_ref() const noexcept { return kind() == ValueKind::Ref; }

  const std::string& as_string() const { return std::get<std::string>(storage_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(storage_); }
  double as_float() const { return std::get<double>(storage_); }
  bool as_bool() const { return std::get<bool>(storage_); }
  const ArgList& as_list() const { return std::get<ArgList>(storage_); }
  const ArgMap& as_map() const { return std::get<ArgMap>(storage_); }
  ArgList& as_list() { return std::get<ArgList>(storage_); }
  ArgMap& as_map() { return std::get<ArgMap>(storage_); }
  Ref as_ref() const { return std::get<Ref>(storage_); }

  const Storage& storage() const noexcept { return storage_; }

  // True if this value or anything nested in it is a Ref.
  bool contains_ref() const;

  // Visits every Ref nested in this value.
  void for_each_ref(const std::function<void(Ref)>& fn) const;

  // Returns a copy with every Ref replaced through `fn`.
  ArgValue map_refs(const std::function<ArgValue(Ref)>& fn) const;

  friend bool operator==(const ArgValue&, const ArgValue&) = default;

 private:
  Storage storage_;
};

// JSON wire form: Ref(k) is the string "#k"; every other value maps to the
// natural JSON type. Floats keep a fractional part so 8 and 8.0 stay distinct.
ordered_json to_json(const ArgValue& value);

// Inverse of to_json. A string is a Ref only when it is exactly '#' followed by
// digits. JSON null is rejected.
ArgValue arg_from_json(const json& j);
ArgValue arg_from_json(const ordered_json& j);

// Like arg_from_json but never produces a Ref ("#3" stays a string).
ArgValue literal_from_json(const json& j);
ArgValue literal_from_json(const ordered_json& j);

// "#12" -> 12; anything else -> npos.
std::size_t parse_ref_token(std::string_view s);

// Shortest round-trip spelling of a double that always reads back as a float.
std::string format_float(double d);

// Code-format literal. Refs are rendered through `ref_name`.
std::string format_literal(const ArgValue& value,
                           const std::function<std::string(Ref)>& ref_name);

// Deterministic, type-tagged text used for sorting and canonical comparison.
std::string canonical_text(const ArgValue& value);

}  // namespace droidcall
