#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "droidcall/errors.hpp"
#include "droidcall/schema.hpp"
#include "droidcall/value.hpp"

namespace droidcall {

enum class RetrieverErrc { KTooLarge, EmptyRegistry, DimensionMismatch, CorruptIndex, DuplicateEntry };

std::string_view to_string(RetrieverErrc kind);

class RetrieverError : public KindError<RetrieverErrc> {
 public:
  using KindError::KindError;
};

inline constexpr std::size_t kEmbeddingDim = 256;

using EmbeddingVector = std::vector<double>;

// Lowercased (ASCII) whitespace-separated tokens.
std::vector<std::string> embedding_tokens(std::string_view text);

// Token counts hashed into `dim` buckets (FNV-1a 64 mod dim), L2-normalized.
// Empty text gives the zero vector.
EmbeddingVector embed_hashed_bow(std::string_view text, std::size_t dim = kEmbeddingDim);

// a.b / (|a||b|), 0 when either vector is zero.
double cosine(const EmbeddingVector& a, const EmbeddingVector& b);

void l2_normalize(EmbeddingVector& v);

class Embedder {
 public:
  virtual ~Embedder() = default;
  virtual EmbeddingVector embed(std::string_view text) const = 0;
  virtual std::size_t dim() const = 0;
};

class HashedBowEmbedder : public Embedder {
 public:
  explicit HashedBowEmbedder(std::size_t dim = kEmbeddingDim) : dim_(dim) {}
  EmbeddingVector embed(std::string_view text) const override { return embed_hashed_bow(text, dim_); }
  std::size_t dim() const override { return dim_; }

 private:
  std::size_t dim_;
};

// Runs `command` with the text on stdin; stdout must be a JSON array of `dim`
// numbers. The result is L2-normalized. Failures raise BackendUnavailable.
class CommandEmbedder : public Embedder {
 public:
  CommandEmbedder(std::string command, std::size_t dim) : command_(std::move(command)), dim_(dim) {}
  EmbeddingVector embed(std::string_view text) const override;
  std::size_t dim() const override { return dim_; }

 private:
  std::string command_;
  std::size_t dim_;
};

struct IndexEntry {
  std::string name;
  EmbeddingVector vector;
};

struct VectorIndex {
  std::size_t dim = kEmbeddingDim;
  std::vector<IndexEntry> entries;

  std::size_t size() const { return entries.size(); }
};

// Text embedded for a schema: "<name> <description>".
std::string function_index_text(const FunctionSchema& schema);

VectorIndex index_functions(const SchemaRegistry& registry, const Embedder& embedder);

// {"dim": n, "entries": [{"name", "vector"}]}, entries in index order.
std::string serialize_index(const VectorIndex& index);
VectorIndex deserialize_index(std::string_view text);

using ScoredName = std::pair<std::string, double>;

// Top-k by cosine, descending, ties by name.
std::vector<ScoredName> query(const VectorIndex& index, const EmbeddingVector& query_vector, std::size_t k);
std::vector<ScoredName> query(const VectorIndex& index, std::string_view text, const Embedder& embedder,
                              std::size_t k);

inline constexpr std::size_t kDefaultRetrieveK = 4;

}  // namespace droidcall
