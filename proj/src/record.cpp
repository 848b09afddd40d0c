#include "droidcall/record.hpp"

namespace droidcall {

ordered_json record_to_json(const GenerationRecord& record) {
  ordered_json j;
  j["query"] = record.query;
  j["answers"] = plan_to_json(record.answers);
  return j;
}

GenerationRecord record_from_json(const json& j) {
  if (!j.is_object() || !j.contains("query") || !j.at("query").is_string())
    throw PlanError(PlanErrc::BadCallShape, "record needs a string \"query\"");
  if (!j.contains("answers")) throw PlanError(PlanErrc::BadCallShape, "record needs \"answers\"");
  return GenerationRecord{j.at("query").get<std::string>(), plan_from_json(j.at("answers"))};
}

}  // namespace droidcall
