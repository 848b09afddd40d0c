#pragma once
// Deterministic generators shared by the unit tests and the acceptance runner.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "droidcall/call_plan.hpp"
#include "droidcall/record.hpp"
#include "droidcall/schema.hpp"

namespace droidcall::testing {

using Rng = std::mt19937_64;

struct PlanShape {
  std::size_t min_calls = 1;
  std::size_t max_calls = 4;
  double ref_probability = 0.35;  // per string-typed argument of a later call
  bool hard_strings = false;      // quotes, escapes, unicode, newlines
  bool nested_lists = false;      // floats, maps and refs inside list arguments
};

std::string random_words(Rng& rng, std::size_t min_words, std::size_t max_words);

// A literal-only value of the declared type.
ArgValue random_value(Rng& rng, TypeTag type, bool hard_strings);

// Required arguments plus a random subset of optional ones. `min_args` forces
// optional arguments in when the required ones are fewer.
FunctionCall random_call(Rng& rng, const FunctionSchema& schema, std::size_t id, bool hard_strings,
                         std::size_t min_args = 0);

// Valid against the registry: backward refs only, types respected.
CallPlan random_plan(Rng& rng, const SchemaRegistry& registry, const PlanShape& shape = {});

// `n` records with distinct queries. Call 0 of every record has at least one
// argument.
std::vector<GenerationRecord> fixture_testset(const SchemaRegistry& registry, std::size_t n,
                                              std::uint64_t seed = 7);

// The two dataset examples used throughout the docs.
GenerationRecord alarm_record();  // Wake me up at 8:30
GenerationRecord timer_and_dial_record();  // 30 minute timer + dial 123456

}  // namespace droidcall::testing
