#include "droidcall/value.hpp"

#include "droidcall/errors.hpp"

#include <charconv>
#include <cmath>
#include <limits>

namespace droidcall {

std::string_view to_string(ValueKind kind) {
  switch (kind) {
    case ValueKind::String: return "string";
    case ValueKind::Int: return "int";
    case ValueKind::Float: return "float";
    case ValueKind::Bool: return "bool";
    case ValueKind::List: return "list";
    case ValueKind::Map: return "map";
    case ValueKind::Ref: return "ref";
  }
  return "unknown";
}

bool ArgValue::contains_ref() const {
  bool found = false;
  for_each_ref([&](Ref) { found = true; });
  return found;
}

void ArgValue::for_each_ref(const std::function<void(Ref)>& fn) const {
  switch (kind()) {
    case ValueKind::Ref:
      fn(as_ref());
      break;
    case ValueKind::List:
      for (const auto& v : as_list()) v.for_each_ref(fn);
      break;
    case ValueKind::Map:
      for (const auto& [k, v] : as_map()) v.for_each_ref(fn);
      break;
    default:
      break;
  }
}

ArgValue ArgValue::map_refs(const std::function<ArgValue(Ref)>& fn) const {
  switch (kind()) {
    case ValueKind::Ref:
      return fn(as_ref());
    case ValueKind::List: {
      ArgList out;
      out.reserve(as_list().size());
      for (const auto& v : as_list()) out.push_back(v.map_refs(fn));
      return out;
    }
    case ValueKind::Map: {
      ArgMap out;
      for (const auto& [k, v] : as_map()) out.emplace(k, v.map_refs(fn));
      return out;
    }
    default:
      return *this;
  }
}

std::size_t parse_ref_token(std::string_view s) {
  if (s.size() < 2 || s.front() != '#') return std::string_view::npos;
  std::size_t id = 0;
  const char* first = s.data() + 1;
  const char* last = s.data() + s.size();
  for (const char* p = first; p != last; ++p) {
    if (*p < '0' || *p > '9') return std::string_view::npos;
  }
  auto [ptr, ec] = std::from_chars(first, last, id);
  if (ec != std::errc{} || ptr != last) return std::string_view::npos;
  return id;
}

ordered_json to_json(const ArgValue& value) {
  switch (value.kind()) {
    case ValueKind::String: return value.as_string();
    case ValueKind::Int: return value.as_int();
    case ValueKind::Float: return value.as_float();
    case ValueKind::Bool: return value.as_bool();
    case ValueKind::List: {
      ordered_json arr = ordered_json::array();
      for (const auto& v : value.as_list()) arr.push_back(to_json(v));
      return arr;
    }
    case ValueKind::Map: {
      ordered_json obj = ordered_json::object();
      for (const auto& [k, v] : value.as_map()) obj[k] = to_json(v);
      return obj;
    }
    case ValueKind::Ref: return "#" + std::to_string(value.as_ref().id);
  }
  return nullptr;
}

namespace {

template <typename Json>
ArgValue from_json_impl(const Json& j, bool refs = true) {
  switch (j.type()) {
    case nlohmann::json::value_t::string: {
      const auto& s = j.template get_ref<const std::string&>();
      if (refs) {
        if (auto id = parse_ref_token(s); id != std::string_view::npos) return Ref{id};
      }
      return s;
    }
    case nlohmann::json::value_t::boolean:
      return j.template get<bool>();
    case nlohmann::json::value_t::number_integer:
      return j.template get<std::int64_t>();
    case nlohmann::json::value_t::number_unsigned: {
      auto u = j.template get<std::uint64_t>();
      if (u > static_cast<std::uint64_t>(std::numeric_limits<std::int64_t>::max()))
        throw Error("integer literal out of range");
      return static_cast<std::int64_t>(u);
    }
    case nlohmann::json::value_t::number_float:
      return j.template get<double>();
    case nlohmann::json::value_t::array: {
      ArgList out;
      for (const auto& e : j) out.push_back(from_json_impl(e, refs));
      return out;
    }
    case nlohmann::json::value_t::object: {
      ArgMap out;
      for (auto it = j.begin(); it != j.end(); ++it) out.emplace(it.key(), from_json_impl(it.value(), refs));
      return out;
    }
    default:
      throw Error("unsupported JSON value for an argument: " + j.dump());
  }
}

}  // namespace

ArgValue arg_from_json(const json& j) { return from_json_impl(j); }
ArgValue arg_from_json(const ordered_json& j) { return from_json_impl(j); }
ArgValue literal_from_json(const json& j) { return from_json_impl(j, false); }
ArgValue literal_from_json(const ordered_json& j) { return from_json_impl(j, false); }

std::string format_float(double d) {
  if (!std::isfinite(d)) throw Error("non-finite float literal");
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), d);
  std::string s(buf, ptr);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

std::string format_literal(const ArgValue& value,
                           const std::function<std::string(Ref)>& ref_name) {
  switch (value.kind()) {
    case ValueKind::String: return json(value.as_string()).dump();
    case ValueKind::Int: return std::to_string(value.as_int());
    case ValueKind::Float: return format_float(value.as_float());
    case ValueKind::Bool: return value.as_bool() ? "true" : "false";
    case ValueKind::List: {
      std::string out = "[";
      bool first = true;
      for (const auto& v : value.as_list()) {
        if (!first) out += ", ";
        first = false;
        out += format_literal(v, ref_name);
      }
      return out + "]";
    }
    case ValueKind::Map: {
      std::string out = "{";
      bool first = true;
      for (const auto& [k, v] : value.as_map()) {
        if (!first) out += ", ";
        first = false;
        out += json(k).dump() + ": " + format_literal(v, ref_name);
      }
      return out + "}";
    }
    case ValueKind::Ref: return ref_name(value.as_ref());
  }
  return {};
}

std::string canonical_text(const ArgValue& value) {
  switch (value.kind()) {
    case ValueKind::String: return "s" + json(value.as_string()).dump();
    case ValueKind::Int: return "i" + std::to_string(value.as_int());
    case ValueKind::Float: return "f" + format_float(value.as_float());
    case ValueKind::Bool: return value.as_bool() ? "btrue" : "bfalse";
    case ValueKind::List: {
      std::string out = "[";
      for (const auto& v : value.as_list()) out += canonical_text(v) + ",";
      return out + "]";
    }
    case ValueKind::Map: {
      std::string out = "{";
      for (const auto& [k, v] : value.as_map()) out += json(k).dump() + ":" + canonical_text(v) + ",";
      return out + "}";
    }
    case ValueKind::Ref: return "r" + std::to_string(value.as_ref().id);
  }
  return {};
}

}  // namespace droidcall
