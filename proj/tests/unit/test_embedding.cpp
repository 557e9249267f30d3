// Copyright 2026 The Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <algorithm>
#include <cmath>
#include <random>
#include <thread>

#include <doctest.h>

#include "logtmpl/embedding.hpp"
#include "logtmpl/error.hpp"

namespace logtmpl {
namespace {

std::shared_ptr<const EmbeddingProvider> Hash() {
  return std::make_shared<HashEmbeddingProvider>();
}

TEST_CASE("hash embeddings are deterministic and unit length") {
  HashEmbeddingProvider p;
  const auto a = p.EmbedWord("POST");
  const auto b = p.EmbedWord("POST");
  CHECK(std::equal(a.values().begin(), a.values().end(), b.values().begin()));
  CHECK(a.dimension() == 64);
  CHECK(a.Norm() == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(Cosine(a, a) == doctest::Approx(1.0).epsilon(1e-9));

  HashEmbeddingProvider other(64, 99);
  const auto c = other.EmbedWord("POST");
  CHECK_FALSE(std::equal(a.values().begin(), a.values().end(), c.values().begin()));
}

TEST_CASE("shared trigrams raise similarity") {
  HashEmbeddingProvider p;
  const auto posting = p.EmbedWord("posting");
  CHECK(Cosine(posting, p.EmbedWord("post")) > Cosine(posting, p.EmbedWord("1004")));
}

TEST_CASE("cosine basics") {
  const EmbeddingVector v({0.3, -0.4, 1.2});
  CHECK(Cosine(v, v) == doctest::Approx(1.0));
  CHECK(Cosine(v, -v) == doctest::Approx(-1.0));
  CHECK(Cosine(EmbeddingVector({1, 0, 0}), EmbeddingVector({0, 1, 0})) == doctest::Approx(0.0));
  CHECK_THROWS_AS(Cosine(EmbeddingVector({1, 0}), EmbeddingVector({1, 0, 0})), Error);
  CHECK_THROWS_AS(Cosine(EmbeddingVector({0, 0}), EmbeddingVector({1, 0})), Error);
  CHECK_THROWS_AS(EmbeddingVector({0, 0}).Normalized(), Error);
}

TEST_CASE("log embedding is the normalized word mean") {
  WordEmbeddings emb(Hash());
  const auto single = TokenizeLog("GET");
  const auto w = emb.Embed("GET");
  const auto l = emb.EmbedLog(single);
  for (std::size_t i = 0; i < w.dimension(); ++i) {
    CHECK(l.values()[i] == doctest::Approx(w.values()[i]).epsilon(1e-12));
  }

  const auto log = TokenizeLog("connection from 10.0.0.1 closed");
  const auto permuted = TokenizeLog("closed 10.0.0.1 connection from");
  const auto a = emb.EmbedLog(log);
  const auto b = emb.EmbedLog(permuted);
  for (std::size_t i = 0; i < a.dimension(); ++i) {
    CHECK(a.values()[i] == doctest::Approx(b.values()[i]).epsilon(1e-12));
  }
  CHECK(Cosine(a, a) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("word similarity predicate") {
  WordEmbeddings emb(Hash());
  for (double tau : {-1.0, 0.0, 0.5, 1.0, 2.0}) CHECK(emb.Similar("GET", "GET", tau));
  CHECK_FALSE(emb.Similar("a", "b", 1.0));
  const std::vector<std::string> words = {"GET", "POST", "blk_1", "blk_2", "10.0.0.1", "done"};
  for (const auto& x : words) {
    for (const auto& y : words) {
      for (double tau : {0.0, 0.25, 0.5}) CHECK(emb.Similar(x, y, tau) == emb.Similar(y, x, tau));
    }
  }
}

TEST_CASE("embedding cache is safe under concurrent use") {
  WordEmbeddings emb(Hash());
  std::vector<std::string> words;
  for (int i = 0; i < 200; ++i) words.push_back("w" + std::to_string(i));
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t) {
    threads.emplace_back([&] {
      for (const auto& w : words) CHECK(emb.Embed(w).dimension() == 64);
    });
  }
  for (auto& t : threads) t.join();
  HashEmbeddingProvider p;
  const auto direct = p.EmbedWord("w7");
  CHECK(std::equal(direct.values().begin(), direct.values().end(), emb.Embed("w7").values().begin()));
}

}  // namespace
}  // namespace logtmpl
