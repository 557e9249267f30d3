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

// Word and log embeddings plus the word-similarity predicate shared by the
// edit-distance cost and demonstration coverage.

#ifndef LOGTMPL_EMBEDDING_HPP_
#define LOGTMPL_EMBEDDING_HPP_

#include <cstdint>
#include <memory>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "logtmpl/template.hpp"

namespace logtmpl {

class EmbeddingVector {
 public:
  EmbeddingVector() = default;
  explicit EmbeddingVector(std::vector<double> values) : values_(std::move(values)) {}

  std::size_t dimension() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double Norm() const;
  // Throws kZeroVector.
  EmbeddingVector Normalized() const;
  EmbeddingVector operator-() const;

 private:
  std::vector<double> values_;
};

// Standard cosine similarity. Throws kDimensionMismatch or kZeroVector.
double Cosine(const EmbeddingVector& a, const EmbeddingVector& b);

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;

  virtual std::size_t dimension() const = 0;
  // One L2-normalized vector per input word, in input order.
  virtual std::vector<EmbeddingVector> EmbedBatch(std::span<const std::string> words) const = 0;

  EmbeddingVector EmbedWord(std::string_view word) const;
};

// Character-trigram feature hashing. Each trigram of "^word$" is hashed with
// the seed and expanded into a +/-1 vector of the configured dimension; the
// sum is L2-normalized. Pure function of (word, seed, dimension).
class HashEmbeddingProvider final : public EmbeddingProvider {
 public:
  static constexpr std::size_t kDefaultDimension = 64;
  static constexpr std::uint64_t kDefaultSeed = 0x6c6f67746d706cULL;

  explicit HashEmbeddingProvider(std::size_t dimension = kDefaultDimension,
                                 std::uint64_t seed = kDefaultSeed);

  std::size_t dimension() const override { return dimension_; }
  std::vector<EmbeddingVector> EmbedBatch(std::span<const std::string> words) const override;

 private:
  EmbeddingVector Embed(std::string_view word) const;

  std::size_t dimension_;
  std::uint64_t seed_;
};

struct ExternalEmbeddingConfig {
  // Base URL, e.g. "http://localhost:8000/v1"; requests go to {endpoint}/embeddings.
  std::string endpoint;
  std::string model = "text-embedding";
  std::string api_key_env = "LOGTMPL_API_KEY";
  std::size_t dimension = 0;  // 0: take whatever the service returns
  std::size_t batch_size = 64;
  std::size_t max_in_flight = 8;
  int timeout_seconds = 30;
};

// OpenAI-compatible embeddings client. Throws kProviderUnavailable on
// transport or protocol failure.
class ExternalEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit ExternalEmbeddingProvider(ExternalEmbeddingConfig config);

  std::size_t dimension() const override { return config_.dimension; }
  std::vector<EmbeddingVector> EmbedBatch(std::span<const std::string> words) const override;

 private:
  std::vector<EmbeddingVector> FetchChunk(std::span<const std::string> words) const;

  ExternalEmbeddingConfig config_;
};

// Memoizing front end over a provider. Safe for concurrent use; cached
// vectors are never evicted, so returned references stay valid.
class WordEmbeddings {
 public:
  explicit WordEmbeddings(std::shared_ptr<const EmbeddingProvider> provider);

  const EmbeddingVector& Embed(const std::string& word) const;
  // Batch-fetches every uncached word; useful before a parallel section.
  void Prefetch(std::span<const std::string> words) const;

  // Mean of word vectors, L2-normalized. Order-invariant.
  EmbeddingVector EmbedLog(const LogRecord& log) const;

  double WordCosine(const std::string& a, const std::string& b) const;

  // Identical strings are always similar; otherwise cosine >= threshold.
  bool Similar(const std::string& a, const std::string& b, double threshold) const;

  const EmbeddingProvider& provider() const { return *provider_; }

 private:
  std::shared_ptr<const EmbeddingProvider> provider_;
  mutable std::shared_mutex mutex_;
  mutable std::unordered_map<std::string, std::unique_ptr<EmbeddingVector>> cache_;
};

}  // namespace logtmpl

#endif  // LOGTMPL_EMBEDDING_HPP_
