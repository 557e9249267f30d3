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

#include "logtmpl/similarity.hpp"

#include <algorithm>
#include <numeric>

#include "logtmpl/error.hpp"

namespace logtmpl {

void BipartiteIndex::Add(const LogRecord& log) {
  auto& words = log_to_words_[log.id];
  for (const auto& w : log.words) {
    if (words.insert(w).second) {
      word_to_logs_[w].insert(log.id);
      ++edges_;
    }
  }
}

BipartiteIndex BuildBipartite(std::span<const LogRecord> pool) {
  BipartiteIndex index;
  for (const auto& log : pool) index.Add(log);
  return index;
}

ResidualLog Residual(const LogRecord& log, const BipartiteIndex& labeled) {
  ResidualLog out{log.id, {}};
  for (const auto& w : log.words) {
    if (!labeled.ContainsWord(w)) out.residual_words.push_back(w);
  }
  return out;
}

ResidualLog Residual(const LogRecord& log, std::span<const LogRecord> labeled) {
  return Residual(log, BuildBipartite(labeled));
}

int WordCost(const std::string& a, const std::string& b, const WordEmbeddings& embeddings,
             const SedOptions& options) {
  if (options.inverted_word_cost) {
    const double c = a == b ? 1.0 : embeddings.WordCosine(a, b);
    return c >= options.tau ? 1 : 0;
  }
  return embeddings.Similar(a, b, options.tau) ? 0 : 1;
}

int SedWords(std::span<const std::string> a, std::span<const std::string> b,
             const WordEmbeddings& embeddings, const SedOptions& options) {
  if (a.empty()) return static_cast<int>(b.size());
  if (b.empty()) return static_cast<int>(a.size());
  // row[j] holds the distance between a[i..] and b[j..], filled back to front.
  const std::size_t n = b.size();
  std::vector<int> row(n + 1);
  for (std::size_t j = 0; j <= n; ++j) row[j] = static_cast<int>(n - j);
  for (std::size_t i = a.size(); i-- > 0;) {
    int diagonal = row[n];  // previous row, column n
    row[n] = static_cast<int>(a.size() - i);
    for (std::size_t j = n; j-- > 0;) {
      const int below = row[j];  // previous row: a[i+1..] vs b[j..]
      const int substitute = diagonal + WordCost(a[i], b[j], embeddings, options);
      const int drop_a = below + 1;
      const int drop_b = row[j + 1] + 1;
      row[j] = std::min({substitute, drop_a, drop_b});
      diagonal = below;
    }
  }
  return row[0];
}

int Sed(const LogRecord& a, const LogRecord& b, std::span<const LogRecord> labeled,
        const WordEmbeddings& embeddings, const SedOptions& options) {
  const auto index = BuildBipartite(labeled);
  const auto ra = Residual(a, index);
  const auto rb = Residual(b, index);
  return SedWords(ra.residual_words, rb.residual_words, embeddings, options);
}

bool RepresentativeSet::Contains(LogId id) const {
  return std::binary_search(members.begin(), members.end(), id);
}

void ValidateDelta(double delta) {
  if (!(delta > 0.0 && delta <= 1.0)) {
    throw Error(ErrorCode::kInvalidDelta, "delta must lie in (0, 1], got " + std::to_string(delta));
  }
}

namespace {

bool WithinRadius(int distance, const LogRecord& a, const LogRecord& b, double delta) {
  const auto shorter = std::min(a.words.size(), b.words.size());
  return static_cast<double>(distance) <= delta * static_cast<double>(shorter);
}

std::uint64_t PairKey(LogId a, LogId b) {
  auto lo = Index(a);
  auto hi = Index(b);
  if (lo > hi) std::swap(lo, hi);
  return (static_cast<std::uint64_t>(lo) << 32) | hi;
}

}  // namespace

RepresentativeSet BuildRepresentativeSet(const LogRecord& anchor, std::span<const LogRecord> pool,
                                         std::span<const LogRecord> labeled, double delta,
                                         const WordEmbeddings& embeddings,
                                         const SedOptions& options) {
  ValidateDelta(delta);
  const auto index = BuildBipartite(labeled);
  const auto ra = Residual(anchor, index);
  RepresentativeSet out{anchor.id, {}, delta};
  for (const auto& s : pool) {
    const auto rs = Residual(s, index);
    const int d = SedWords(ra.residual_words, rs.residual_words, embeddings, options);
    if (WithinRadius(d, anchor, s, delta)) out.members.push_back(s.id);
  }
  std::sort(out.members.begin(), out.members.end());
  out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
  return out;
}

SedEngine::SedEngine(const WordEmbeddings& embeddings, SedOptions options)
    : embeddings_(embeddings), options_(options) {}

void SedEngine::AddLabeled(const LogRecord& log) {
  const auto before = labeled_.word_count();
  labeled_.Add(log);
  if (labeled_.word_count() != before) {
    ++version_;
    std::lock_guard lock(cache_mutex_);
    cache_.clear();
  }
}

ResidualLog SedEngine::Residual(const LogRecord& log) const {
  return logtmpl::Residual(log, labeled_);
}

std::size_t SedEngine::cached_pairs() const {
  std::lock_guard lock(cache_mutex_);
  return cache_.size();
}

int SedEngine::Distance(const LogRecord& a, const LogRecord& b) const {
  const auto key = PairKey(a.id, b.id);
  {
    std::lock_guard lock(cache_mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const auto ra = Residual(a);
  const auto rb = Residual(b);
  const int d = SedWords(ra.residual_words, rb.residual_words, embeddings_, options_);
  std::lock_guard lock(cache_mutex_);
  cache_.emplace(key, d);
  return d;
}

RepresentativeSet SedEngine::Representatives(const LogRecord& anchor,
                                             std::span<const LogRecord> pool,
                                             double delta) const {
  ValidateDelta(delta);
  RepresentativeSet out{anchor.id, {}, delta};
  for (const auto& s : pool) {
    if (WithinRadius(Distance(anchor, s), anchor, s, delta)) out.members.push_back(s.id);
  }
  std::sort(out.members.begin(), out.members.end());
  out.members.erase(std::unique(out.members.begin(), out.members.end()), out.members.end());
  return out;
}

std::map<LogId, RepresentativeSet> SedEngine::AllRepresentatives(std::span<const LogRecord> pool,
                                                                 double delta) const {
  ValidateDelta(delta);
  std::map<LogId, RepresentativeSet> out;
  for (const auto& s : pool) out[s.id] = RepresentativeSet{s.id, {}, delta};

  // Residuals once per log, distances once per unordered pair.
  std::vector<std::vector<std::string>> residuals;
  residuals.reserve(pool.size());
  for (const auto& s : pool) residuals.push_back(Residual(s).residual_words);

  for (std::size_t i = 0; i < pool.size(); ++i) {
    for (std::size_t j = i; j < pool.size(); ++j) {
      const auto key = PairKey(pool[i].id, pool[j].id);
      int d;
      {
        std::lock_guard lock(cache_mutex_);
        auto it = cache_.find(key);
        d = it != cache_.end() ? it->second : -1;
      }
      if (d < 0) {
        d = SedWords(residuals[i], residuals[j], embeddings_, options_);
        std::lock_guard lock(cache_mutex_);
        cache_.emplace(key, d);
      }
      if (WithinRadius(d, pool[i], pool[j], delta)) {
        out[pool[i].id].members.push_back(pool[j].id);
        if (i != j) out[pool[j].id].members.push_back(pool[i].id);
      }
    }
  }
  for (auto& [id, set] : out) {
    std::sort(set.members.begin(), set.members.end());
    set.members.erase(std::unique(set.members.begin(), set.members.end()), set.members.end());
  }
  return out;
}

}  // namespace logtmpl
