#include "droidcall/evaluation.hpp"

#include <charconv>
#include <functional>

#include <spdlog/spdlog.h>

#include "droidcall/io.hpp"

namespace droidcall {

std::string_view to_string(EvalErrc kind) {
  switch (kind) {
    case EvalErrc::EmptyTestSet: return "EmptyTestSet";
    case EvalErrc::UnknownFunction: return "UnknownFunction";
  }
  return "EvalError";
}

double OverlapScorer::similarity(std::string_view a, std::string_view b) const {
  if (a == b) return 1.0;
  return std::max(0.0, cosine(embed_hashed_bow(a), embed_hashed_bow(b)));
}

double CommandScorer::similarity(std::string_view a, std::string_view b) const {
  if (a == b) return 1.0;
  ordered_json in;
  in["a"] = a;
  in["b"] = b;
  std::string out;
  try {
    out = run_command(command_, in.dump());
  } catch (const IoError& e) {
    throw BackendError(BackendErrc::BackendUnavailable, e.what());
  }
  json v = json::parse(out, nullptr, false);
  if (v.is_discarded() || !v.is_number())
    throw BackendError(BackendErrc::BackendUnavailable, "scorer '" + command_ + "' must print a number");
  double s = v.get<double>();
  if (!(s >= 0.0 && s <= 1.0))
    throw BackendError(BackendErrc::BackendUnavailable, "scorer '" + command_ + "' printed a value outside [0, 1]");
  return s;
}

double semantic_similarity(std::string_view a, std::string_view b, const SemanticScorer& scorer) {
  return scorer.similarity(a, b);
}

MatchMode mode_of(const MatchModes& modes, std::string_view function, std::string_view param) {
  auto it = modes.find({std::string(function), std::string(param)});
  return it == modes.end() ? MatchMode::Exact : it->second;
}

bool param_match(const ArgValue& gold, const ArgValue& pred, MatchMode mode, const SemanticScorer& scorer) {
  if (mode == MatchMode::Semantic && gold.is_string() && pred.is_string())
    return scorer.similarity(gold.as_string(), pred.as_string()) >= scorer.threshold();
  return gold == pred;
}

namespace {

// Structural comparison that follows Refs into the two plans. Without plans,
// Refs compare by id.
struct RefContext {
  const CallPlan* gold = nullptr;
  const CallPlan* pred = nullptr;
  const MatchModes* modes = nullptr;
  const SemanticScorer* scorer = nullptr;

  bool values(const ArgValue& g, const ArgValue& p, MatchMode mode) const {
    if (g.is_ref() || p.is_ref()) {
      if (!g.is_ref() || !p.is_ref()) return false;
      if (!gold || !pred) return g.as_ref() == p.as_ref();
      if (g.as_ref().id >= gold->size() || p.as_ref().id >= pred->size()) return false;
      return calls(gold->calls[g.as_ref().id], pred->calls[p.as_ref().id]);
    }
    if (g.contains_ref() || p.contains_ref()) {
      if (g.kind() != p.kind()) return false;
      if (g.is_list()) {
        const auto& gl = g.as_list();
        const auto& pl = p.as_list();
        if (gl.size() != pl.size()) return false;
        for (std::size_t i = 0; i < gl.size(); ++i) {
          if (!values(gl[i], pl[i], MatchMode::Exact)) return false;
        }
        return true;
      }
      const auto& gm = g.as_map();
      const auto& pm = p.as_map();
      if (gm.size() != pm.size()) return false;
      for (auto gi = gm.begin(), pi = pm.begin(); gi != gm.end(); ++gi, ++pi) {
        if (gi->first != pi->first || !values(gi->second, pi->second, MatchMode::Exact)) return false;
      }
      return true;
    }
    return param_match(g, p, mode, *scorer);
  }

  bool calls(const FunctionCall& g, const FunctionCall& p) const {
    if (g.name != p.name || g.arguments.size() != p.arguments.size()) return false;
    for (const auto& [key, gv] : g.arguments) {
      auto it = p.arguments.find(key);
      if (it == p.arguments.end() || !values(gv, it->second, mode_of(*modes, g.name, key))) return false;
    }
    return true;
  }
};

CallScore score_with(const RefContext& ctx, const FunctionCall& gold, const FunctionCall* pred) {
  CallScore s;
  s.gold_call_id = gold.id;
  s.p_total = gold.arguments.size();
  if (!pred || pred->name != gold.name) return s;
  s.matched_pred_id = pred->id;
  for (const auto& [key, gv] : gold.arguments) {
    auto it = pred->arguments.find(key);
    if (it != pred->arguments.end() && ctx.values(gv, it->second, mode_of(*ctx.modes, gold.name, key)))
      ++s.p_correct;
  }
  s.score = s.p_total == 0 ? 1.0 : static_cast<double>(s.p_correct) / static_cast<double>(s.p_total);
  return s;
}

}  // namespace

CallScore score_call(const FunctionCall& gold, const std::optional<FunctionCall>& pred, const MatchModes& modes,
                     const SemanticScorer& scorer) {
  RefContext ctx{nullptr, nullptr, &modes, &scorer};
  return score_with(ctx, gold, pred ? &*pred : nullptr);
}

CallScore score_call_in_plans(const CallPlan& gold_plan, std::size_t gold_id, const CallPlan& pred_plan,
                              std::optional<std::size_t> pred_id, const MatchModes& modes,
                              const SemanticScorer& scorer) {
  RefContext ctx{&gold_plan, &pred_plan, &modes, &scorer};
  return score_with(ctx, gold_plan.calls.at(gold_id), pred_id ? &pred_plan.calls.at(*pred_id) : nullptr);
}

std::vector<std::optional<std::size_t>> align_calls(const CallPlan& gold, const CallPlan& pred,
                                                    const MatchModes& modes, const SemanticScorer& scorer) {
  const std::size_t n = gold.size(), m = pred.size();
  // Candidate pred ids per gold call with their scores, in pred id order.
  std::vector<std::vector<std::pair<std::size_t, double>>> cand(n);
  for (std::size_t g = 0; g < n; ++g) {
    for (std::size_t p = 0; p < m; ++p) {
      if (gold.calls[g].name == pred.calls[p].name)
        cand[g].emplace_back(p, score_call_in_plans(gold, g, pred, p, modes, scorer).score);
    }
  }

  constexpr double kEps = 1e-12;
  std::vector<std::optional<std::size_t>> best(n), cur(n);
  std::size_t best_count = 0;
  double best_total = -1.0;
  std::vector<bool> used(m, false);

  std::function<void(std::size_t, std::size_t, double)> dfs = [&](std::size_t g, std::size_t count, double total) {
    // Even matching every remaining gold call with score 1 cannot win.
    std::size_t remaining = n - g;
    if (count + remaining < best_count) return;
    if (count + remaining == best_count && total + static_cast<double>(remaining) < best_total - kEps) return;
    if (g == n) {
      if (count > best_count || (count == best_count && total > best_total + kEps)) {
        best = cur;
        best_count = count;
        best_total = total;
      }
      return;
    }
    for (const auto& [p, s] : cand[g]) {
      if (used[p]) continue;
      used[p] = true;
      cur[g] = p;
      dfs(g + 1, count + 1, total + s);
      used[p] = false;
    }
    cur[g] = std::nullopt;
    dfs(g + 1, count, total);
  };
  dfs(0, 0, 0.0);
  return best;
}

SampleResult score_sample(const GenerationRecord& gold, const CallPlan& pred, const MatchModes& modes,
                          const SemanticScorer& scorer) {
  SampleResult r;
  ArgumentComparator semantic = [&](const FunctionCall& call, std::string_view arg, const ArgValue& a,
                                    const ArgValue& b) -> std::optional<bool> {
    if (mode_of(modes, call.name, arg) != MatchMode::Semantic || !a.is_string() || !b.is_string())
      return std::nullopt;
    return scorer.similarity(a.as_string(), b.as_string()) >= scorer.threshold();
  };
  r.exact = find_plan_isomorphism(gold.answers, pred, semantic).has_value();
  auto assignment = align_calls(gold.answers, pred, modes, scorer);
  for (std::size_t g = 0; g < gold.answers.size(); ++g)
    r.scores.push_back(score_call_in_plans(gold.answers, g, pred, assignment[g], modes, scorer));
  return r;
}

SampleResult failed_sample(const GenerationRecord& gold, std::string reason) {
  SampleResult r;
  r.parse_error = std::move(reason);
  for (const auto& c : gold.answers.calls) {
    CallScore s;
    s.gold_call_id = c.id;
    s.p_total = c.arguments.size();
    r.scores.push_back(s);
  }
  return r;
}

EvalReport aggregate(const std::vector<SampleResult>& samples) {
  if (samples.empty()) throw EvalError(EvalErrc::EmptyTestSet, "no samples to aggregate");
  EvalReport rep;
  rep.samples = samples;
  rep.n_total = samples.size();
  double total = 0.0;
  for (const auto& s : samples) {
    if (s.exact) ++rep.n_perfect;
    for (const auto& c : s.scores) {
      rep.call_scores.push_back(c);
      total += c.score;
    }
  }
  rep.acc = static_cast<double>(rep.n_perfect) / static_cast<double>(rep.n_total);
  rep.acc_soft = rep.call_scores.empty() ? 0.0 : total / static_cast<double>(rep.call_scores.size());
  return rep;
}

ordered_json report_to_json(const EvalReport& report, const std::vector<GenerationRecord>& testset) {
  ordered_json j;
  j["n_total"] = report.n_total;
  j["n_perfect"] = report.n_perfect;
  j["acc"] = report.acc;
  j["acc_soft"] = report.acc_soft;
  j["samples"] = ordered_json::array();
  for (std::size_t i = 0; i < report.samples.size(); ++i) {
    const auto& s = report.samples[i];
    ordered_json sj;
    sj["index"] = i;
    if (i < testset.size()) sj["query"] = testset[i].query;
    sj["exact"] = s.exact;
    if (s.parse_error) sj["parse_error"] = *s.parse_error;
    sj["calls"] = ordered_json::array();
    for (const auto& c : s.scores) {
      ordered_json cj;
      cj["gold_call_id"] = c.gold_call_id;
      cj["matched_pred_id"] = c.matched_pred_id ? ordered_json(*c.matched_pred_id) : ordered_json(nullptr);
      cj["p_correct"] = c.p_correct;
      cj["p_total"] = c.p_total;
      cj["score"] = c.score;
      sj["calls"].push_back(std::move(cj));
    }
    j["samples"].push_back(std::move(sj));
  }
  return j;
}

std::vector<FunctionSchema> fake_retrieve(const GenerationRecord& sample, const SchemaRegistry& registry) {
  try {
    return record_functions(sample, registry);
  } catch (const FormatError& e) {
    throw EvalError(EvalErrc::UnknownFunction, e.what());
  }
}

VectorRetriever::VectorRetriever(const SchemaRegistry& registry, const Embedder& embedder, std::size_t k)
    : registry_(registry), embedder_(embedder), index_(index_functions(registry, embedder)), k_(k) {}

std::vector<FunctionSchema> VectorRetriever::retrieve(const GenerationRecord& sample) const {
  std::vector<FunctionSchema> out;
  for (const auto& [name, score] : query(index_, sample.query, embedder_, std::min(k_, index_.size())))
    out.push_back(*registry_.find(name));
  return out;
}

EvalReport evaluate_model(const std::vector<GenerationRecord>& testset, LlmBackend& model, PromptFormat format,
                          const SemanticScorer& scorer, const FunctionRetriever& retriever,
                          const MatchModes& modes, const EvalOptions& options) {
  if (testset.empty()) throw EvalError(EvalErrc::EmptyTestSet, "the test set is empty");
  std::vector<SampleResult> results;
  for (std::size_t i = 0; i < testset.size(); ++i) {
    const auto& sample = testset[i];
    auto prompt = render_eval_prompt(format, retriever.retrieve(sample), sample.query, options.fewshot,
                                     options.separator);
    std::string raw;
    try {
      raw = model.complete(ChatPrompt{prompt.system, prompt.user});
    } catch (const std::exception& e) {
      throw EvalAborted("sample " + std::to_string(i) + ": " + e.what(), std::move(results));
    }
    CallPlan pred;
    try {
      pred = parse_answer(raw, format, options.separator);
    } catch (const Error& e) {
      spdlog::info("sample {}: unparsable answer: {}", i, e.what());
      results.push_back(failed_sample(sample, e.what()));
      continue;
    }
    results.push_back(score_sample(sample, pred, modes, scorer));
  }
  return aggregate(results);
}

}  // namespace droidcall
