#pragma once

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "droidcall/call_plan.hpp"
#include "droidcall/device_state.hpp"
#include "droidcall/errors.hpp"
#include "droidcall/value.hpp"

namespace droidcall {

enum class DispatchErrc { HandlerError, UnknownFunction, UnresolvedRef };

std::string_view to_string(DispatchErrc kind);

class DispatchError : public KindError<DispatchErrc> {
 public:
  using KindError::KindError;
};

struct IntentResult {
  std::size_t call_id = 0;
  std::string function;
  bool ok = true;
  std::string error;             // set when !ok
  std::optional<ArgValue> value;  // handler return, only when ok

  friend bool operator==(const IntentResult&, const IntentResult&) = default;
};

struct DispatchOutcome {
  IntentResult result;
  DeviceState state;
};

// Runs the handler for one literal-only call on a copy of `state`. Throws
// DispatchError(HandlerError | UnknownFunction | UnresolvedRef).
DispatchOutcome dispatch(const FunctionCall& call, const DeviceState& state);

// Names with a registered handler.
std::vector<std::string> handler_names();

// State fields the handler of `function` may change. Throws UnknownFunction.
const std::set<StateField>& handler_fields(std::string_view function);

struct ExecutionResult {
  std::vector<IntentResult> results;  // in execution order
  DeviceState state;
};

// Executes in topological order, substituting Ref(k) with call k's value. The
// first handler failure is recorded and stops the plan. Throws CycleDetected
// and DispatchError(UnresolvedRef).
ExecutionResult execute_plan(const CallPlan& plan, const DeviceState& state);

ordered_json intent_result_to_json(const IntentResult& result);

// "30 minutes", "1 hour 15 minutes", "90s", "1.5 hours", "an hour".
// Throws DispatchError(HandlerError) on anything else.
std::int64_t parse_duration(std::string_view text);

}  // namespace droidcall
