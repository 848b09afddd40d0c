#include <algorithm>
#include <cctype>
#include <cmath>

#include "droidcall/io.hpp"
#include "droidcall/llm_backend.hpp"
#include "droidcall/retriever.hpp"

namespace droidcall {

std::vector<std::string> embedding_tokens(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur));
      cur.clear();
    } else {
      cur.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

void l2_normalize(EmbeddingVector& v) {
  double sq = 0.0;
  for (double x : v) sq += x * x;
  if (sq == 0.0) return;
  double norm = std::sqrt(sq);
  for (double& x : v) x /= norm;
}

EmbeddingVector embed_hashed_bow(std::string_view text, std::size_t dim) {
  EmbeddingVector v(dim, 0.0);
  for (const auto& t : embedding_tokens(text)) v[fnv1a64(t) % dim] += 1.0;
  l2_normalize(v);
  return v;
}

double cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.size() != b.size())
    throw RetrieverError(RetrieverErrc::DimensionMismatch,
                         std::to_string(a.size()) + " vs " + std::to_string(b.size()));
  double dot = 0.0, aa = 0.0, bb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    dot += a[i] * b[i];
    aa += a[i] * a[i];
    bb += b[i] * b[i];
  }
  if (aa == 0.0 || bb == 0.0) return 0.0;
  // sqrt(aa * bb) rather than sqrt(aa) * sqrt(bb): identical vectors give exactly 1.
  double c = dot / std::sqrt(aa * bb);
  return std::clamp(c, -1.0, 1.0);
}

EmbeddingVector CommandEmbedder::embed(std::string_view text) const {
  if (text.empty()) return EmbeddingVector(dim_, 0.0);
  std::string out;
  try {
    out = run_command(command_, text);
  } catch (const IoError& e) {
    throw BackendError(BackendErrc::BackendUnavailable, e.what());
  }
  json j = json::parse(out, nullptr, false);
  if (j.is_discarded() || !j.is_array() || j.size() != dim_)
    throw BackendError(BackendErrc::BackendUnavailable,
                       "embedder '" + command_ + "' must print a JSON array of " + std::to_string(dim_) + " numbers");
  EmbeddingVector v;
  for (const auto& x : j) {
    if (!x.is_number()) throw BackendError(BackendErrc::BackendUnavailable, "embedder printed a non-number");
    v.push_back(x.get<double>());
  }
  l2_normalize(v);
  return v;
}

}  // namespace droidcall
