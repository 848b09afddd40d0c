#include "droidcall/call_plan.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <unordered_map>

#include "droidcall/code_syntax.hpp"

namespace droidcall {

std::string_view to_string(PlanErrc kind) {
  switch (kind) {
    case PlanErrc::NotJson: return "NotJson";
    case PlanErrc::BadCallShape: return "BadCallShape";
    case PlanErrc::BadReference: return "BadReference";
    case PlanErrc::SyntaxError: return "SyntaxError";
    case PlanErrc::UnboundResultVar: return "UnboundResultVar";
  }
  return "PlanError";
}

std::string_view to_string(ViolationKind kind) {
  switch (kind) {
    case ViolationKind::UnknownFunction: return "UnknownFunction";
    case ViolationKind::UnknownArgument: return "UnknownArgument";
    case ViolationKind::MissingRequiredArgument: return "MissingRequiredArgument";
    case ViolationKind::TypeMismatch: return "TypeMismatch";
    case ViolationKind::BadReference: return "BadReference";
  }
  return "Violation";
}

namespace {

std::string describe_cycle(const std::vector<std::size_t>& cycle) {
  std::string out;
  for (std::size_t i = 0; i < cycle.size(); ++i) {
    if (i) out += " -> ";
    out += std::to_string(cycle[i]);
  }
  return out;
}

// Targets referenced by call `c`, deduplicated and sorted.
std::vector<std::size_t> ref_targets(const FunctionCall& c) {
  std::set<std::size_t> out;
  for (const auto& [k, v] : c.arguments) v.for_each_ref([&](Ref r) { out.insert(r.id); });
  return {out.begin(), out.end()};
}

// Returns a cycle (first node repeated at the end) or an empty vector.
std::vector<std::size_t> find_cycle(const CallPlan& plan) {
  const std::size_t n = plan.size();
  std::vector<int> color(n, 0);  // 0 white, 1 on stack, 2 done
  std::vector<std::size_t> stack;
  std::vector<std::size_t> cycle;
  std::function<bool(std::size_t)> visit = [&](std::size_t u) {
    color[u] = 1;
    stack.push_back(u);
    for (std::size_t v : ref_targets(plan.calls[u])) {
      if (v >= n) continue;
      if (color[v] == 1) {
        auto it = std::find(stack.begin(), stack.end(), v);
        cycle.assign(it, stack.end());
        cycle.push_back(v);
        return true;
      }
      if (color[v] == 0 && visit(v)) return true;
    }
    stack.pop_back();
    color[u] = 2;
    return false;
  };
  for (std::size_t u = 0; u < n; ++u) {
    if (color[u] == 0 && visit(u)) return cycle;
  }
  return {};
}

std::string_view strip_code_fence(std::string_view text) {
  auto is_space = [](char c) { return c == ' ' || c == '\n' || c == '\r' || c == '\t'; };
  while (!text.empty() && is_space(text.front())) text.remove_prefix(1);
  while (!text.empty() && is_space(text.back())) text.remove_suffix(1);
  if (text.size() >= 6 && text.substr(0, 3) == "```" && text.substr(text.size() - 3) == "```") {
    auto nl = text.find('\n');
    if (nl != std::string_view::npos && nl < text.size() - 3) return text.substr(nl + 1, text.size() - 3 - nl - 1);
  }
  return text;
}

}  // namespace

CycleDetected::CycleDetected(std::vector<std::size_t> cycle)
    : Error("CycleDetected: " + describe_cycle(cycle)), cycle_(std::move(cycle)) {}

std::set<std::pair<std::size_t, std::size_t>> CallPlan::edges() const {
  std::set<std::pair<std::size_t, std::size_t>> out;
  for (const auto& c : calls) {
    for (std::size_t t : ref_targets(c)) out.emplace(c.id, t);
  }
  return out;
}

void check_references(const CallPlan& plan) {
  for (const auto& c : plan.calls) {
    for (std::size_t t : ref_targets(c)) {
      if (t >= plan.size())
        throw PlanError(PlanErrc::BadReference,
                        "call " + std::to_string(c.id) + " references missing call #" + std::to_string(t));
    }
  }
  if (auto cycle = find_cycle(plan); !cycle.empty()) throw CycleDetected(std::move(cycle));
}

CallPlan plan_from_json(const json& input) {
  const json* answers = &input;
  if (input.is_object() && input.contains("answers")) answers = &input.at("answers");
  if (!answers->is_array()) throw PlanError(PlanErrc::BadCallShape, "answers must be a JSON array");

  CallPlan plan;
  std::map<std::int64_t, std::size_t> declared;  // declared id -> position
  std::size_t with_id = 0;
  for (const auto& item : *answers) {
    if (!item.is_object()) throw PlanError(PlanErrc::BadCallShape, "each call must be a JSON object");
    std::size_t pos = plan.calls.size();
    if (!item.contains("name") || !item.at("name").is_string())
      throw PlanError(PlanErrc::BadCallShape, "call " + std::to_string(pos) + " has no string \"name\"");
    if (item.contains("id")) {
      const auto& id = item.at("id");
      if (!id.is_number_integer() || id.get<std::int64_t>() < 0)
        throw PlanError(PlanErrc::BadCallShape, "call ids must be non-negative integers");
      if (!declared.emplace(id.get<std::int64_t>(), pos).second)
        throw PlanError(PlanErrc::BadCallShape, "duplicate call id " + id.dump());
      ++with_id;
    }
    FunctionCall call;
    call.id = pos;
    call.name = item.at("name").get<std::string>();
    if (item.contains("arguments")) {
      const auto& args = item.at("arguments");
      if (!args.is_object())
        throw PlanError(PlanErrc::BadCallShape, "arguments of call " + std::to_string(pos) + " must be an object");
      for (auto it = args.begin(); it != args.end(); ++it) {
        try {
          call.arguments.emplace(it.key(), arg_from_json(it.value()));
        } catch (const std::exception& e) {
          throw PlanError(PlanErrc::BadCallShape, "argument '" + it.key() + "': " + e.what());
        }
      }
    }
    plan.calls.push_back(std::move(call));
  }
  if (with_id != 0 && with_id != plan.size())
    throw PlanError(PlanErrc::BadCallShape, "either every call or no call must carry an id");

  if (with_id != 0) {
    for (auto& c : plan.calls) {
      for (auto& [k, v] : c.arguments) {
        v = v.map_refs([&](Ref r) -> ArgValue {
          auto it = declared.find(static_cast<std::int64_t>(r.id));
          if (it == declared.end())
            throw PlanError(PlanErrc::BadReference, "reference to undeclared call #" + std::to_string(r.id));
          return Ref{it->second};
        });
      }
    }
  }
  try {
    check_references(plan);
  } catch (const CycleDetected& e) {
    throw PlanError(PlanErrc::BadReference, e.what());
  }
  return plan;
}

CallPlan parse_json_answer(std::string_view text) {
  json parsed;
  try {
    parsed = json::parse(strip_code_fence(text));
  } catch (const json::parse_error& e) {
    throw PlanError(PlanErrc::NotJson, e.what());
  }
  return plan_from_json(parsed);
}

ordered_json plan_to_json(const CallPlan& plan) {
  ordered_json arr = ordered_json::array();
  for (const auto& c : plan.calls) {
    ordered_json call;
    call["id"] = c.id;
    call["name"] = c.name;
    ordered_json args = ordered_json::object();
    for (const auto& [k, v] : c.arguments) args[k] = to_json(v);
    call["arguments"] = std::move(args);
    arr.push_back(std::move(call));
  }
  return arr;
}

CallPlan parse_code_answer(std::string_view text, const Separator& separator) {
  if (!separator.open.empty()) {
    if (auto open = text.find(separator.open); open != std::string_view::npos)
      text.remove_prefix(open + separator.open.size());
  }
  if (!separator.close.empty()) {
    if (auto close = text.rfind(separator.close); close != std::string_view::npos)
      text = text.substr(0, close);
  }

  using syntax::TokenKind;
  syntax::TokenCursor cursor(syntax::tokenize(text));
  CallPlan plan;
  std::unordered_map<std::string, std::size_t> bindings;
  while (!cursor.at(TokenKind::End)) {
    std::optional<std::string> target;
    if (cursor.at(TokenKind::Ident) && cursor.peek(1).kind == TokenKind::Equals) {
      target = cursor.next().text;
      cursor.next();
    }
    const auto& name = cursor.expect(TokenKind::Ident, "function name");
    FunctionCall call;
    call.id = plan.calls.size();
    call.name = name.text;
    cursor.expect(TokenKind::LParen, "'('");
    auto resolve = [&](const syntax::Token& t) -> ArgValue {
      if (auto it = bindings.find(t.text); it != bindings.end()) return Ref{it->second};
      if (target && t.text == *target)
        throw PlanError(PlanErrc::BadReference, "'" + t.text + "' refers to the call that defines it", t.line,
                        t.column);
      throw PlanError(PlanErrc::UnboundResultVar, "'" + t.text + "' is not bound by an earlier call", t.line,
                      t.column);
    };
    while (!cursor.at(TokenKind::RParen)) {
      if (!(cursor.at(TokenKind::Ident) && cursor.peek(1).kind == TokenKind::Equals))
        cursor.fail(cursor.peek(), "expected keyword argument 'name=value'");
      const auto& key = cursor.next();
      cursor.next();
      if (call.arguments.count(key.text)) cursor.fail(key, "duplicate argument '" + key.text + "'");
      std::string k = key.text;
      call.arguments.emplace(std::move(k), syntax::parse_value(cursor, resolve));
      if (!cursor.accept(TokenKind::Comma)) break;
    }
    cursor.expect(TokenKind::RParen, "')'");
    if (target) bindings[*target] = call.id;
    plan.calls.push_back(std::move(call));
  }
  return plan;
}

std::string render_code_calls(const CallPlan& plan) {
  auto name_of = [](Ref r) { return "result" + std::to_string(r.id + 1); };
  std::string out;
  for (const auto& c : plan.calls) {
    if (!out.empty()) out += '\n';
    out += "result" + std::to_string(c.id + 1) + " = " + c.name + "(";
    bool first = true;
    for (const auto& [k, v] : c.arguments) {
      if (!first) out += ", ";
      first = false;
      out += k + "=" + format_literal(v, name_of);
    }
    out += ")";
  }
  return out;
}

std::vector<Violation> validate_plan(const CallPlan& plan, const SchemaRegistry& registry) {
  std::vector<Violation> out;
  for (const auto& c : plan.calls) {
    const FunctionSchema* schema = registry.find(c.name);
    if (!schema) {
      out.push_back({ViolationKind::UnknownFunction, c.id, c.name, "", "function '" + c.name + "' is not registered"});
      continue;
    }
    for (const auto& [k, v] : c.arguments) {
      const ParamSpec* p = schema->find_param(k);
      if (!p) {
        out.push_back({ViolationKind::UnknownArgument, c.id, c.name, k, c.name + " has no parameter '" + k + "'"});
        continue;
      }
      v.for_each_ref([&](Ref r) {
        if (r.id >= plan.size() || r.id == c.id)
          out.push_back({ViolationKind::BadReference, c.id, c.name, k,
                         "reference to #" + std::to_string(r.id) + " has no valid target"});
      });
      if (!v.is_ref() && !value_matches_type(v, p->type)) {
        out.push_back({ViolationKind::TypeMismatch, c.id, c.name, k,
                       k + " expects " + std::string(to_string(p->type)) + ", got " +
                           std::string(to_string(v.kind()))});
      }
    }
    for (const auto& p : schema->arguments) {
      if (p.required && !c.arguments.count(p.name))
        out.push_back({ViolationKind::MissingRequiredArgument, c.id, c.name, p.name,
                       c.name + " is missing required argument '" + p.name + "'"});
    }
  }
  if (auto cycle = find_cycle(plan); !cycle.empty()) {
    out.push_back({ViolationKind::BadReference, cycle.front(), plan.calls[cycle.front()].name, "",
                   "reference cycle " + describe_cycle(cycle)});
  }
  return out;
}

namespace {

// Kahn's algorithm; `before(a, b)` orders ready calls.
std::vector<std::size_t> ordered_topo(const CallPlan& plan,
                                      const std::function<bool(std::size_t, std::size_t)>& before) {
  const std::size_t n = plan.size();
  std::vector<std::vector<std::size_t>> users(n);
  std::vector<std::size_t> pending(n, 0);
  for (const auto& c : plan.calls) {
    for (std::size_t t : ref_targets(c)) {
      if (t >= n)
        throw PlanError(PlanErrc::BadReference,
                        "call " + std::to_string(c.id) + " references missing call #" + std::to_string(t));
      users[t].push_back(c.id);
      ++pending[c.id];
    }
  }
  auto cmp = [&](std::size_t a, std::size_t b) { return before(b, a); };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> ready(cmp);
  for (std::size_t i = 0; i < n; ++i) {
    if (pending[i] == 0) ready.push(i);
  }
  std::vector<std::size_t> order;
  while (!ready.empty()) {
    std::size_t u = ready.top();
    ready.pop();
    order.push_back(u);
    for (std::size_t v : users[u]) {
      if (--pending[v] == 0) ready.push(v);
    }
  }
  if (order.size() != n) throw CycleDetected(find_cycle(plan));
  return order;
}

bool values_equivalent(const ArgValue& a, const ArgValue& b, const std::vector<std::size_t>& mapping) {
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case ValueKind::Ref:
      return a.as_ref().id < mapping.size() && mapping[a.as_ref().id] == b.as_ref().id;
    case ValueKind::List: {
      const auto& la = a.as_list();
      const auto& lb = b.as_list();
      if (la.size() != lb.size()) return false;
      for (std::size_t i = 0; i < la.size(); ++i) {
        if (!values_equivalent(la[i], lb[i], mapping)) return false;
      }
      return true;
    }
    case ValueKind::Map: {
      const auto& ma = a.as_map();
      const auto& mb = b.as_map();
      if (ma.size() != mb.size()) return false;
      for (auto ia = ma.begin(), ib = mb.begin(); ia != ma.end(); ++ia, ++ib) {
        if (ia->first != ib->first || !values_equivalent(ia->second, ib->second, mapping)) return false;
      }
      return true;
    }
    default:
      return a == b;
  }
}

}  // namespace

std::vector<std::size_t> topo_order(const CallPlan& plan) {
  return ordered_topo(plan, [](std::size_t a, std::size_t b) { return a < b; });
}

CallPlan canonicalize(const CallPlan& plan) {
  const std::size_t n = plan.size();
  check_references(plan);
  // Content key of each call with referenced calls expanded in place, so the
  // key does not depend on id numbering.
  std::vector<std::optional<std::string>> keys(n);
  std::function<const std::string&(std::size_t)> key_of = [&](std::size_t i) -> const std::string& {
    if (!keys[i]) {
      const auto& c = plan.calls[i];
      std::string k = c.name + "(";
      for (const auto& [name, v] : c.arguments) {
        ArgValue expanded = v.map_refs([&](Ref r) -> ArgValue { return "<" + key_of(r.id) + ">"; });
        k += name + "=" + canonical_text(expanded) + ";";
      }
      keys[i] = k + ")";
    }
    return *keys[i];
  };
  auto order = ordered_topo(plan, [&](std::size_t a, std::size_t b) {
    const auto& ka = key_of(a);
    const auto& kb = key_of(b);
    return ka != kb ? ka < kb : a < b;
  });
  std::vector<std::size_t> new_id(n);
  for (std::size_t pos = 0; pos < n; ++pos) new_id[order[pos]] = pos;
  CallPlan out;
  for (std::size_t pos = 0; pos < n; ++pos) {
    FunctionCall c = plan.calls[order[pos]];
    c.id = pos;
    for (auto& [k, v] : c.arguments) v = v.map_refs([&](Ref r) -> ArgValue { return Ref{new_id[r.id]}; });
    out.calls.push_back(std::move(c));
  }
  return out;
}

std::optional<std::vector<std::size_t>> find_plan_isomorphism(const CallPlan& a, const CallPlan& b,
                                                              const ArgumentComparator& compare) {
  const std::size_t n = a.size();
  if (b.size() != n) return std::nullopt;
  auto order = topo_order(a);
  check_references(b);

  auto same_shape = [](const FunctionCall& x, const FunctionCall& y) {
    if (x.name != y.name || x.arguments.size() != y.arguments.size()) return false;
    for (auto ix = x.arguments.begin(), iy = y.arguments.begin(); ix != x.arguments.end(); ++ix, ++iy) {
      if (ix->first != iy->first) return false;
    }
    return true;
  };

  std::vector<std::size_t> mapping(n, n);
  std::vector<bool> used(n, false);

  // Refs of a call always point at calls assigned earlier in `order`.
  auto args_match = [&](const FunctionCall& x, const FunctionCall& y) {
    for (auto ix = x.arguments.begin(), iy = y.arguments.begin(); ix != x.arguments.end(); ++ix, ++iy) {
      const ArgValue& va = ix->second;
      const ArgValue& vb = iy->second;
      if (compare && !va.contains_ref() && !vb.contains_ref()) {
        if (auto verdict = compare(x, ix->first, va, vb)) {
          if (!*verdict) return false;
          continue;
        }
      }
      if (!values_equivalent(va, vb, mapping)) return false;
    }
    return true;
  };

  std::function<bool(std::size_t)> assign = [&](std::size_t k) -> bool {
    if (k == n) return true;
    const FunctionCall& x = a.calls[order[k]];
    for (std::size_t j = 0; j < n; ++j) {
      if (used[j] || !same_shape(x, b.calls[j])) continue;
      if (!args_match(x, b.calls[j])) continue;
      mapping[order[k]] = j;
      used[j] = true;
      if (assign(k + 1)) return true;
      used[j] = false;
      mapping[order[k]] = n;
    }
    return false;
  };
  if (!assign(0)) return std::nullopt;
  return mapping;
}

bool plans_equal(const CallPlan& a, const CallPlan& b) { return find_plan_isomorphism(a, b).has_value(); }

}  // namespace droidcall
