#include "droidcall/retriever.hpp"

#include <algorithm>
#include <set>

namespace droidcall {

std::string_view to_string(RetrieverErrc kind) {
  switch (kind) {
    case RetrieverErrc::KTooLarge: return "KTooLarge";
    case RetrieverErrc::EmptyRegistry: return "EmptyRegistry";
    case RetrieverErrc::DimensionMismatch: return "DimensionMismatch";
    case RetrieverErrc::CorruptIndex: return "CorruptIndex";
    case RetrieverErrc::DuplicateEntry: return "DuplicateEntry";
  }
  return "RetrieverError";
}

std::string function_index_text(const FunctionSchema& schema) { return schema.name + " " + schema.description; }

VectorIndex index_functions(const SchemaRegistry& registry, const Embedder& embedder) {
  if (registry.empty()) throw RetrieverError(RetrieverErrc::EmptyRegistry, "cannot index an empty registry");
  VectorIndex index;
  index.dim = embedder.dim();
  for (const auto& [name, schema] : registry.schemas()) {
    auto v = embedder.embed(function_index_text(schema));
    if (v.size() != index.dim)
      throw RetrieverError(RetrieverErrc::DimensionMismatch, "embedding of " + name + " has the wrong size");
    index.entries.push_back({name, std::move(v)});
  }
  return index;
}

std::string serialize_index(const VectorIndex& index) {
  ordered_json j;
  j["dim"] = index.dim;
  j["entries"] = ordered_json::array();
  for (const auto& e : index.entries) {
    ordered_json entry;
    entry["name"] = e.name;
    entry["vector"] = e.vector;
    j["entries"].push_back(std::move(entry));
  }
  return j.dump();
}

VectorIndex deserialize_index(std::string_view text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw RetrieverError(RetrieverErrc::CorruptIndex, "index is not JSON");
  VectorIndex index;
  std::set<std::string> names;
  try {
    index.dim = j.at("dim").get<std::size_t>();
    for (const auto& e : j.at("entries")) {
      IndexEntry entry{e.at("name").get<std::string>(), e.at("vector").get<EmbeddingVector>()};
      if (entry.vector.size() != index.dim)
        throw RetrieverError(RetrieverErrc::DimensionMismatch, "entry " + entry.name + " has the wrong size");
      if (!names.insert(entry.name).second)
        throw RetrieverError(RetrieverErrc::DuplicateEntry, "entry " + entry.name + " appears twice");
      index.entries.push_back(std::move(entry));
    }
  } catch (const json::exception& e) {
    throw RetrieverError(RetrieverErrc::CorruptIndex, e.what());
  }
  return index;
}

std::vector<ScoredName> query(const VectorIndex& index, const EmbeddingVector& q, std::size_t k) {
  if (k == 0 || k > index.size())
    throw RetrieverError(RetrieverErrc::KTooLarge,
                         "k=" + std::to_string(k) + " for an index of " + std::to_string(index.size()));
  std::vector<ScoredName> all;
  all.reserve(index.size());
  for (const auto& e : index.entries) all.emplace_back(e.name, cosine(e.vector, q));
  std::sort(all.begin(), all.end(), [](const ScoredName& a, const ScoredName& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });
  all.resize(k);
  return all;
}

std::vector<ScoredName> query(const VectorIndex& index, std::string_view text, const Embedder& embedder,
                              std::size_t k) {
  return query(index, embedder.embed(text), k);
}

}  // namespace droidcall
