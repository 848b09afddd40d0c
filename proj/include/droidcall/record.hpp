#pragma once

#include <string>
#include <vector>

#include "droidcall/call_plan.hpp"

namespace droidcall {

// One generated query with the calls that answer it.
struct GenerationRecord {
  std::string query;
  CallPlan answers;

  friend bool operator==(const GenerationRecord&, const GenerationRecord&) = default;
};

// {"query": ..., "answers": [{"id", "name", "arguments"}, ...]}
ordered_json record_to_json(const GenerationRecord& record);

// Lenient conversion (ids optional, forward refs allowed). Use
// validate_record for the strict generated-data contract.
GenerationRecord record_from_json(const json& j);

}  // namespace droidcall
