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

#include "logtmpl/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>

#include "logtmpl/error.hpp"

namespace logtmpl {
namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t Fnv1a(std::string_view bytes, std::uint64_t seed) {
  std::uint64_t h = kFnvOffset ^ seed;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::uint64_t SplitMix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double EmbeddingVector::Norm() const {
  double sum = 0.0;
  for (double v : values_) sum += v * v;
  return std::sqrt(sum);
}

EmbeddingVector EmbeddingVector::Normalized() const {
  const double norm = Norm();
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw Error(ErrorCode::kZeroVector, "cannot normalize a zero vector");
  }
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = values_[i] / norm;
  return EmbeddingVector(std::move(out));
}

EmbeddingVector EmbeddingVector::operator-() const {
  std::vector<double> out(values_.size());
  for (std::size_t i = 0; i < values_.size(); ++i) out[i] = -values_[i];
  return EmbeddingVector(std::move(out));
}

double Cosine(const EmbeddingVector& a, const EmbeddingVector& b) {
  if (a.dimension() != b.dimension()) {
    throw Error(ErrorCode::kDimensionMismatch, std::to_string(a.dimension()) + " vs " +
                                                   std::to_string(b.dimension()));
  }
  const double na = a.Norm();
  const double nb = b.Norm();
  if (!(na > 0.0) || !(nb > 0.0)) throw Error(ErrorCode::kZeroVector, "cosine of zero vector");
  double dot = 0.0;
  auto av = a.values();
  auto bv = b.values();
  for (std::size_t i = 0; i < av.size(); ++i) dot += av[i] * bv[i];
  double c = dot / (na * nb);
  if (c > 1.0) c = 1.0;
  if (c < -1.0) c = -1.0;
  return c;
}

EmbeddingVector EmbeddingProvider::EmbedWord(std::string_view word) const {
  if (word.empty()) throw Error(ErrorCode::kEmptyWord, "cannot embed an empty word");
  std::string w(word);
  return EmbedBatch(std::span<const std::string>(&w, 1)).front();
}

HashEmbeddingProvider::HashEmbeddingProvider(std::size_t dimension, std::uint64_t seed)
    : dimension_(dimension), seed_(seed) {
  if (dimension_ == 0) throw Error(ErrorCode::kInvalidConfig, "embedding dimension must be > 0");
}

EmbeddingVector HashEmbeddingProvider::Embed(std::string_view word) const {
  if (word.empty()) throw Error(ErrorCode::kEmptyWord, "cannot embed an empty word");
  const std::string padded = "^" + std::string(word) + "$";
  std::vector<double> acc(dimension_, 0.0);
  auto add_feature = [&](std::string_view gram) {
    std::uint64_t state = Fnv1a(gram, seed_);
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < dimension_; ++i) {
      if (i % 64 == 0) bits = SplitMix64(state);
      acc[i] += (bits >> (i % 64)) & 1U ? 1.0 : -1.0;
    }
  };
  for (std::size_t i = 0; i + 3 <= padded.size(); ++i) {
    add_feature(std::string_view(padded).substr(i, 3));
  }
  EmbeddingVector v(std::move(acc));
  if (!(v.Norm() > 0.0)) {
    // Trigram contributions cancelled exactly; fall back to the whole word.
    std::vector<double> whole(dimension_, 0.0);
    acc.swap(whole);
    add_feature(padded);
    v = EmbeddingVector(std::move(acc));
  }
  return v.Normalized();
}

std::vector<EmbeddingVector> HashEmbeddingProvider::EmbedBatch(
    std::span<const std::string> words) const {
  std::vector<EmbeddingVector> out;
  out.reserve(words.size());
  for (const auto& w : words) out.push_back(Embed(w));
  return out;
}

WordEmbeddings::WordEmbeddings(std::shared_ptr<const EmbeddingProvider> provider)
    : provider_(std::move(provider)) {}

const EmbeddingVector& WordEmbeddings::Embed(const std::string& word) const {
  {
    std::shared_lock lock(mutex_);
    auto it = cache_.find(word);
    if (it != cache_.end()) return *it->second;
  }
  auto vec = std::make_unique<EmbeddingVector>(provider_->EmbedWord(word));
  std::unique_lock lock(mutex_);
  auto [it, inserted] = cache_.try_emplace(word, std::move(vec));
  return *it->second;
}

void WordEmbeddings::Prefetch(std::span<const std::string> words) const {
  std::vector<std::string> missing;
  {
    std::shared_lock lock(mutex_);
    for (const auto& w : words) {
      if (!w.empty() && !cache_.contains(w)) missing.push_back(w);
    }
  }
  if (missing.empty()) return;
  std::sort(missing.begin(), missing.end());
  missing.erase(std::unique(missing.begin(), missing.end()), missing.end());
  auto vectors = provider_->EmbedBatch(missing);
  std::unique_lock lock(mutex_);
  for (std::size_t i = 0; i < missing.size(); ++i) {
    cache_.try_emplace(missing[i], std::make_unique<EmbeddingVector>(std::move(vectors[i])));
  }
}

EmbeddingVector WordEmbeddings::EmbedLog(const LogRecord& log) const {
  if (log.words.empty()) throw Error(ErrorCode::kEmptyLog, "log has no words");
  std::vector<double> mean(provider_->dimension() ? provider_->dimension()
                                                  : Embed(log.words.front()).dimension(),
                           0.0);
  for (const auto& w : log.words) {
    auto values = Embed(w).values();
    if (values.size() != mean.size()) {
      throw Error(ErrorCode::kDimensionMismatch, "word '" + w + "' has a different dimension");
    }
    for (std::size_t i = 0; i < mean.size(); ++i) mean[i] += values[i];
  }
  for (double& v : mean) v /= static_cast<double>(log.words.size());
  return EmbeddingVector(std::move(mean)).Normalized();
}

double WordEmbeddings::WordCosine(const std::string& a, const std::string& b) const {
  if (a == b) return 1.0;
  return Cosine(Embed(a), Embed(b));
}

bool WordEmbeddings::Similar(const std::string& a, const std::string& b, double threshold) const {
  if (a == b) return true;
  return WordCosine(a, b) >= threshold;
}

}  // namespace logtmpl
