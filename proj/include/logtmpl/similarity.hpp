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

// Semantic edit distance over residual words, the log-word bipartite index,
// and representative sets.

#ifndef LOGTMPL_SIMILARITY_HPP_
#define LOGTMPL_SIMILARITY_HPP_

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "logtmpl/embedding.hpp"
#include "logtmpl/template.hpp"

namespace logtmpl {

// Log <-> word incidence. Every edge is present in both maps.
class BipartiteIndex {
 public:
  void Add(const LogRecord& log);

  bool ContainsWord(const std::string& word) const { return word_to_logs_.contains(word); }
  std::size_t word_count() const { return word_to_logs_.size(); }
  std::size_t log_count() const { return log_to_words_.size(); }
  std::size_t edge_count() const { return edges_; }

  const std::map<LogId, std::set<std::string>>& log_to_words() const { return log_to_words_; }
  const std::map<std::string, std::set<LogId>>& word_to_logs() const { return word_to_logs_; }

 private:
  std::map<LogId, std::set<std::string>> log_to_words_;
  std::map<std::string, std::set<LogId>> word_to_logs_;
  std::size_t edges_ = 0;
};

BipartiteIndex BuildBipartite(std::span<const LogRecord> pool);

struct ResidualLog {
  LogId source{};
  // Source words not identified in any labeled log, in source order.
  std::vector<std::string> residual_words;
};

ResidualLog Residual(const LogRecord& log, const BipartiteIndex& labeled);
ResidualLog Residual(const LogRecord& log, std::span<const LogRecord> labeled);

struct SedOptions {
  double tau = 0.0;
  // false: similar words substitute for free (cost 0). true: the inverted
  // cost, 1 when cosine >= tau and 0 otherwise.
  bool inverted_word_cost = false;
};

int WordCost(const std::string& a, const std::string& b, const WordEmbeddings& embeddings,
             const SedOptions& options);

// Unit-cost insert/delete edit distance with semantic substitution cost,
// computed over two word sequences with an O(|a|*|b|) table.
int SedWords(std::span<const std::string> a, std::span<const std::string> b,
             const WordEmbeddings& embeddings, const SedOptions& options);

// Distance between two logs over their residuals w.r.t. the labeled set.
int Sed(const LogRecord& a, const LogRecord& b, std::span<const LogRecord> labeled,
        const WordEmbeddings& embeddings, const SedOptions& options);

struct RepresentativeSet {
  LogId anchor{};
  std::vector<LogId> members;  // ascending
  double delta = 0.5;

  bool Contains(LogId id) const;
};

// Throws kInvalidDelta unless delta is in (0, 1].
void ValidateDelta(double delta);

// Members are pool logs with sed(anchor, s) <= delta * min(|anchor|, |s|),
// lengths counted over full logs.
RepresentativeSet BuildRepresentativeSet(const LogRecord& anchor, std::span<const LogRecord> pool,
                                         std::span<const LogRecord> labeled, double delta,
                                         const WordEmbeddings& embeddings,
                                         const SedOptions& options);

// Holds the labeled vocabulary and memoizes pairwise distances. The cache is
// tied to a labeled-set version and dropped whenever labeled logs are added.
// Reads may run concurrently; AddLabeled must not overlap with them.
class SedEngine {
 public:
  SedEngine(const WordEmbeddings& embeddings, SedOptions options);

  void AddLabeled(const LogRecord& log);
  const BipartiteIndex& labeled_index() const { return labeled_; }
  std::uint64_t version() const { return version_; }
  const SedOptions& options() const { return options_; }
  const WordEmbeddings& embeddings() const { return embeddings_; }

  ResidualLog Residual(const LogRecord& log) const;
  int Distance(const LogRecord& a, const LogRecord& b) const;
  std::size_t cached_pairs() const;

  RepresentativeSet Representatives(const LogRecord& anchor, std::span<const LogRecord> pool,
                                    double delta) const;
  // Representative set of every pool log against the pool itself.
  std::map<LogId, RepresentativeSet> AllRepresentatives(std::span<const LogRecord> pool,
                                                        double delta) const;

 private:
  const WordEmbeddings& embeddings_;
  SedOptions options_;
  BipartiteIndex labeled_;
  std::uint64_t version_ = 0;

  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::uint64_t, int> cache_;
};

}  // namespace logtmpl

#endif  // LOGTMPL_SIMILARITY_HPP_
