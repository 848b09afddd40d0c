#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace droidcall {

// Root of every exception the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// An error tagged with a module-specific kind enum. Each enum provides a
// `to_string(Kind)` overload found by ADL.
template <typename Kind>
class KindError : public Error {
 public:
  KindError(Kind kind, const std::string& detail)
      : Error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

}  // namespace droidcall
