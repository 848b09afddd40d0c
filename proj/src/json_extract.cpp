#include <vector>

#include "droidcall/filters.hpp"

namespace droidcall {

namespace {

// End (one past) of the balanced span opening at raw[start], or npos when the
// delimiters do not balance before the end of input.
std::size_t balanced_end(std::string_view raw, std::size_t start) {
  std::vector<char> closers;
  bool in_string = false;
  for (std::size_t i = start; i < raw.size(); ++i) {
    char c = raw[i];
    if (in_string) {
      if (c == '\\') {
        ++i;
      } else if (c == '"') {
        in_string = false;
      }
      continue;
    }
    switch (c) {
      case '"': in_string = true; break;
      case '{': closers.push_back('}'); break;
      case '[': closers.push_back(']'); break;
      case '}':
      case ']':
        if (closers.empty() || closers.back() != c) return std::string_view::npos;
        closers.pop_back();
        if (closers.empty()) return i + 1;
        break;
      default: break;
    }
  }
  return std::string_view::npos;
}

bool all_objects(const json& arr) {
  for (const auto& v : arr) {
    if (!v.is_object()) return false;
  }
  return true;
}

}  // namespace

std::vector<json> extract_json_values(std::string_view raw) {
  std::vector<json> out;
  std::size_t i = 0;
  while (i < raw.size()) {
    char c = raw[i];
    if (c != '{' && c != '[') {
      ++i;
      continue;
    }
    std::size_t end = balanced_end(raw, i);
    if (end == std::string_view::npos) {
      ++i;
      continue;
    }
    json value = json::parse(raw.substr(i, end - i), nullptr, false);
    if (value.is_discarded()) {
      ++i;
      continue;
    }
    if (value.is_array() && all_objects(value)) {
      for (auto& v : value) out.push_back(std::move(v));
    } else {
      out.push_back(std::move(value));
    }
    i = end;
  }
  return out;
}

}  // namespace droidcall
