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

#include "logtmpl/demonstration.hpp"

#include <algorithm>
#include <tuple>

#include "logtmpl/error.hpp"

namespace logtmpl {
namespace {

std::vector<std::string> DistinctWords(const LogRecord& log) {
  std::vector<std::string> words = log.words;
  std::sort(words.begin(), words.end());
  words.erase(std::unique(words.begin(), words.end()), words.end());
  return words;
}

std::vector<bool> CoverageMask(const std::vector<std::string>& target_words,
                               const LogRecord& demo, const WordEmbeddings& embeddings,
                               double tau) {
  std::vector<bool> mask(target_words.size(), false);
  for (std::size_t i = 0; i < target_words.size(); ++i) {
    for (const auto& w : demo.words) {
      if (embeddings.Similar(target_words[i], w, tau)) {
        mask[i] = true;
        break;
      }
    }
  }
  return mask;
}

void FillCoverage(DemoSet& set, const LogRecord& target, const WordEmbeddings& embeddings,
                  double tau) {
  for (const auto& w : DistinctWords(target)) {
    bool covered = false;
    for (const auto& demo : set.demos) {
      for (const auto& dw : demo.log.words) {
        if (embeddings.Similar(w, dw, tau)) {
          covered = true;
          break;
        }
      }
      if (covered) break;
    }
    (covered ? set.covered_words : set.uncovered).insert(w);
  }
}

}  // namespace

std::set<std::string> CoveredWords(const LogRecord& demo, const LogRecord& target,
                                   const WordEmbeddings& embeddings, double tau) {
  const auto words = DistinctWords(target);
  const auto mask = CoverageMask(words, demo, embeddings, tau);
  std::set<std::string> out;
  for (std::size_t i = 0; i < words.size(); ++i) {
    if (mask[i]) out.insert(words[i]);
  }
  return out;
}

DemoSet SelectDemos(const LogRecord& target, std::span<const LabeledLog> labeled,
                    const WordEmbeddings& embeddings, double tau, std::size_t max_demos) {
  DemoSet out;
  out.target = target.id;
  const auto words = DistinctWords(target);

  std::vector<const LabeledLog*> candidates;
  candidates.reserve(labeled.size());
  for (const auto& l : labeled) candidates.push_back(&l);
  std::sort(candidates.begin(), candidates.end(),
            [](const LabeledLog* a, const LabeledLog* b) { return a->log.id < b->log.id; });

  std::vector<std::vector<bool>> masks;
  masks.reserve(candidates.size());
  for (const auto* c : candidates) masks.push_back(CoverageMask(words, c->log, embeddings, tau));

  std::vector<bool> covered(words.size(), false);
  std::vector<bool> used(candidates.size(), false);
  while (true) {
    std::size_t best = candidates.size();
    std::size_t best_gain = 0;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      if (used[c]) continue;
      std::size_t gain = 0;
      for (std::size_t i = 0; i < words.size(); ++i) gain += masks[c][i] && !covered[i];
      if (gain > best_gain) {
        best_gain = gain;
        best = c;
      }
    }
    if (best_gain == 0) break;
    if (out.demos.size() >= max_demos) {
      out.cap_reached = true;
      break;
    }
    used[best] = true;
    for (std::size_t i = 0; i < words.size(); ++i) covered[i] = covered[i] || masks[best][i];
    out.demos.push_back(*candidates[best]);
  }

  for (std::size_t i = 0; i < words.size(); ++i) {
    (covered[i] ? out.covered_words : out.uncovered).insert(words[i]);
  }
  return out;
}

DemoSet SelectDemosTopK(const LogRecord& target, std::span<const LabeledLog> labeled,
                        std::size_t k, DemoMetric metric, const WordEmbeddings& embeddings,
                        const SedOptions& options) {
  if (k == 0) throw Error(ErrorCode::kInvalidConfig, "top-k demonstration mode needs k >= 1");
  // (rank key, id, index); smaller key is closer.
  std::vector<std::tuple<double, LogId, std::size_t>> ranked;
  ranked.reserve(labeled.size());
  const EmbeddingVector target_vec =
      metric == DemoMetric::kCosine ? embeddings.EmbedLog(target) : EmbeddingVector();
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const auto& candidate = labeled[i].log;
    double key;
    if (metric == DemoMetric::kSed) {
      key = SedWords(target.words, candidate.words, embeddings, options);
    } else {
      key = -Cosine(target_vec, embeddings.EmbedLog(candidate));
    }
    ranked.emplace_back(key, candidate.id, i);
  }
  std::sort(ranked.begin(), ranked.end());

  DemoSet out;
  out.target = target.id;
  for (std::size_t r = 0; r < ranked.size() && r < k; ++r) {
    out.demos.push_back(labeled[std::get<2>(ranked[r])]);
  }
  FillCoverage(out, target, embeddings, options.tau);
  return out;
}

}  // namespace logtmpl
