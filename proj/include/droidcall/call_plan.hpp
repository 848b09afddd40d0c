#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "droidcall/errors.hpp"
#include "droidcall/schema.hpp"
#include "droidcall/value.hpp"

namespace droidcall {

enum class PlanErrc { NotJson, BadCallShape, BadReference, SyntaxError, UnboundResultVar };

std::string_view to_string(PlanErrc kind);

class PlanError : public KindError<PlanErrc> {
 public:
  PlanError(PlanErrc kind, const std::string& detail, std::size_t line = 0, std::size_t column = 0)
      : KindError(kind, line ? detail + " (line " + std::to_string(line) + ", column " +
                                   std::to_string(column) + ")"
                             : detail),
        line_(line),
        column_(column) {}

  // 1-based position for SyntaxError / UnboundResultVar, 0 when unknown.
  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

class CycleDetected : public Error {
 public:
  explicit CycleDetected(std::vector<std::size_t> cycle);
  // Call ids along the cycle, the first one repeated at the end.
  const std::vector<std::size_t>& cycle() const noexcept { return cycle_; }

 private:
  std::vector<std::size_t> cycle_;
};

struct FunctionCall {
  std::size_t id = 0;
  std::string name;
  ArgMap arguments;

  friend bool operator==(const FunctionCall&, const FunctionCall&) = default;
};

// Ordered calls whose ids equal their positions. Refs inside arguments
// (including inside lists and maps) form the edge set.
struct CallPlan {
  std::vector<FunctionCall> calls;

  std::size_t size() const { return calls.size(); }
  bool empty() const { return calls.empty(); }

  // (caller id, referenced id) pairs.
  std::set<std::pair<std::size_t, std::size_t>> edges() const;

  friend bool operator==(const CallPlan&, const CallPlan&) = default;
};

struct Separator {
  std::string open = "<sep>";
  std::string close = "</sep>";
};

// Parses a JSON answers array (the record "answers" layout). A missing "id"
// takes the call's position; declared ids are remapped to positions.
CallPlan parse_json_answer(std::string_view text);
CallPlan plan_from_json(const json& answers);
ordered_json plan_to_json(const CallPlan& plan);

// Parses `resultK = name(key=value, ...)` statements, optionally wrapped in the
// separator pair. A right-hand identifier bound by an earlier statement is a
// Ref to that call.
CallPlan parse_code_answer(std::string_view text, const Separator& separator = {});

// Renders one statement per call, binding call i to `result{i+1}`.
std::string render_code_calls(const CallPlan& plan);

// Throws PlanError(BadReference) when a Ref names a missing call and
// CycleDetected when the Ref graph has a cycle.
void check_references(const CallPlan& plan);

enum class ViolationKind {
  UnknownFunction,
  UnknownArgument,
  MissingRequiredArgument,
  TypeMismatch,
  BadReference,
};

std::string_view to_string(ViolationKind kind);

struct Violation {
  ViolationKind kind;
  std::size_t call_id;
  std::string function;
  std::string argument;
  std::string message;
};

std::vector<Violation> validate_plan(const CallPlan& plan, const SchemaRegistry& registry);

// Ref targets before their users; among independent calls, lower id first.
std::vector<std::size_t> topo_order(const CallPlan& plan);

// Calls reordered into a deterministic topological order (ties broken by call
// content) and renumbered positionally.
CallPlan canonicalize(const CallPlan& plan);

// Structural equality up to call order and id numbering.
bool plans_equal(const CallPlan& a, const CallPlan& b);

// Optional override for comparing one top-level argument pair. Return
// std::nullopt to fall back to structural equality.
using ArgumentComparator = std::function<std::optional<bool>(
    const FunctionCall& a_call, std::string_view argument, const ArgValue& a, const ArgValue& b)>;

// Finds a bijection a-call -> b-call preserving names, argument names, values
// and the Ref structure. Returns mapping[a_id] = b_id.
std::optional<std::vector<std::size_t>> find_plan_isomorphism(
    const CallPlan& a, const CallPlan& b, const ArgumentComparator& compare = nullptr);

}  // namespace droidcall
