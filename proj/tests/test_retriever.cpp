#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "droidcall/llm_backend.hpp"
#include "droidcall/retriever.hpp"

using namespace droidcall;

namespace {

RetrieverErrc retriever_errc(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const RetrieverError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "expected RetrieverError";
  return RetrieverErrc::CorruptIndex;
}

double norm(const EmbeddingVector& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST(Embedding, HashedBow) {
  auto a = embed_hashed_bow("set alarm clock");
  EXPECT_EQ(a.size(), kEmbeddingDim);
  EXPECT_EQ(a, embed_hashed_bow("set alarm clock"));
  EXPECT_NEAR(norm(a), 1.0, 1e-12);
  EXPECT_EQ(cosine(a, embed_hashed_bow("Alarm CLOCK set")), 1.0);
  auto zero = embed_hashed_bow("");
  EXPECT_EQ(norm(zero), 0.0);
  EXPECT_EQ(cosine(a, zero), 0.0);
  // Oracle: counts per bucket, then normalize.
  auto v = embed_hashed_bow("b a b", 16);
  EmbeddingVector expect(16, 0.0);
  expect[fnv1a64("a") % 16] += 1;
  expect[fnv1a64("b") % 16] += 2;
  l2_normalize(expect);
  for (std::size_t i = 0; i < 16; ++i) EXPECT_NEAR(v[i], expect[i], 1e-15);
  EXPECT_EQ(embedding_tokens(" Hello\tWORLD \n"), (std::vector<std::string>{"hello", "world"}));
}

TEST(Embedding, CosineBounds) {
  EmbeddingVector a{1, 0}, b{-1, 0}, c{0, 2};
  EXPECT_EQ(cosine(a, b), -1.0);
  EXPECT_EQ(cosine(a, c), 0.0);
  EXPECT_EQ(cosine(c, c), 1.0);
}

TEST(Index, DefaultRegistry) {
  auto reg = load_default_registry();
  HashedBowEmbedder emb;
  auto idx = index_functions(reg, emb);
  EXPECT_EQ(idx.size(), 24u);
  auto again = index_functions(reg, emb);
  for (std::size_t i = 0; i < idx.size(); ++i) EXPECT_EQ(idx.entries[i].vector, again.entries[i].vector);
  for (const auto& e : idx.entries) EXPECT_NEAR(norm(e.vector), 1.0, 1e-6);
  EXPECT_EQ(retriever_errc([&] { index_functions(SchemaRegistry{}, emb); }), RetrieverErrc::EmptyRegistry);
}

TEST(Index, SelfRetrievalAndMonotoneInK) {
  auto reg = load_default_registry();
  HashedBowEmbedder emb;
  auto idx = index_functions(reg, emb);
  for (const auto& [name, s] : reg.schemas()) {
    auto top = query(idx, function_index_text(s), emb, 1);
    ASSERT_EQ(top.size(), 1u);
    EXPECT_EQ(top[0].first, name);
  }
  auto full = query(idx, "send a message to my friend", emb, idx.size());
  ASSERT_EQ(full.size(), 24u);
  for (std::size_t i = 1; i < full.size(); ++i) {
    EXPECT_TRUE(full[i - 1].second > full[i].second ||
                (full[i - 1].second == full[i].second && full[i - 1].first < full[i].first));
  }
  for (std::size_t k = 1; k <= idx.size(); ++k) {
    auto part = query(idx, "send a message to my friend", emb, k);
    EXPECT_TRUE(std::equal(part.begin(), part.end(), full.begin()));
  }
}

TEST(Index, WakeMeUpFindsAlarm) {
  auto reg = load_default_registry();
  HashedBowEmbedder emb;
  auto idx = index_functions(reg, emb);
  auto qv = emb.embed("wake me up alarm morning");
  // Exhaustive scan oracle.
  std::vector<std::pair<double, std::string>> scan;
  for (const auto& e : idx.entries) scan.push_back({-cosine(qv, e.vector), e.name});
  std::sort(scan.begin(), scan.end());
  auto top = query(idx, qv, 3);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(top[i].first, scan[i].second);
  EXPECT_TRUE(std::any_of(top.begin(), top.end(), [](const ScoredName& s) { return s.first == "ACTION_SET_ALARM"; }));
}

TEST(Index, KBounds) {
  auto reg = load_default_registry();
  HashedBowEmbedder emb;
  auto idx = index_functions(reg, emb);
  EXPECT_EQ(retriever_errc([&] { query(idx, "x", emb, 0); }), RetrieverErrc::KTooLarge);
  EXPECT_EQ(retriever_errc([&] { query(idx, "x", emb, 25); }), RetrieverErrc::KTooLarge);
  EXPECT_EQ(retriever_errc([&] { query(idx, EmbeddingVector(3, 0.0), 1); }), RetrieverErrc::DimensionMismatch);
}

TEST(Index, SerializeRoundTrip) {
  auto reg = load_default_registry();
  HashedBowEmbedder emb;
  auto idx = index_functions(reg, emb);
  auto text = serialize_index(idx);
  auto back = deserialize_index(text);
  ASSERT_EQ(back.size(), idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    EXPECT_EQ(back.entries[i].name, idx.entries[i].name);
    EXPECT_EQ(back.entries[i].vector, idx.entries[i].vector);
  }
  EXPECT_EQ(serialize_index(back), text);
  EXPECT_EQ(retriever_errc([] { deserialize_index("{\"dim\": 2"); }), RetrieverErrc::CorruptIndex);
  EXPECT_EQ(retriever_errc([] { deserialize_index(R"({"dim": 2, "entries": [{"name": "a", "vector": [1]}]})"); }),
            RetrieverErrc::DimensionMismatch);
  EXPECT_EQ(retriever_errc([] {
              deserialize_index(
                  R"({"dim": 1, "entries": [{"name": "a", "vector": [1]}, {"name": "a", "vector": [1]}]})");
            }),
            RetrieverErrc::DuplicateEntry);
}

TEST(Embedder, Command) {
  CommandEmbedder ok("echo '[3, 4]'", 2);
  auto v = ok.embed("anything");
  EXPECT_NEAR(v[0], 0.6, 1e-12);
  EXPECT_NEAR(v[1], 0.8, 1e-12);
  CommandEmbedder wrong_dim("echo '[1, 2, 3]'", 2);
  EXPECT_THROW(wrong_dim.embed("x"), BackendError);
  CommandEmbedder failing("exit 3", 2);
  EXPECT_THROW(failing.embed("x"), BackendError);
}
