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

// Per-log demonstration selection: adaptive greedy word cover, and a fixed
// top-k mode kept for ablation.

#ifndef LOGTMPL_DEMONSTRATION_HPP_
#define LOGTMPL_DEMONSTRATION_HPP_

#include <set>
#include <span>
#include <string>
#include <vector>

#include "logtmpl/embedding.hpp"
#include "logtmpl/similarity.hpp"
#include "logtmpl/template.hpp"

namespace logtmpl {

struct DemoSet {
  LogId target{};
  std::vector<LabeledLog> demos;         // selection order
  std::set<std::string> covered_words;   // distinct target words with a similar demo word
  std::set<std::string> uncovered;
  bool cap_reached = false;
};

// Guards prompt size on pathological corpora.
inline constexpr std::size_t kMaxDemos = 16;

// Target words having at least one similar word (at threshold tau) in the
// demo log.
std::set<std::string> CoveredWords(const LogRecord& demo, const LogRecord& target,
                                   const WordEmbeddings& embeddings, double tau);

// Greedy cover: repeatedly add the labeled log that covers the most still
// uncovered target words, ties to the smaller log id, until no labeled log
// adds coverage. Words nothing can cover are reported in `uncovered`.
DemoSet SelectDemos(const LogRecord& target, std::span<const LabeledLog> labeled,
                    const WordEmbeddings& embeddings, double tau,
                    std::size_t max_demos = kMaxDemos);

enum class DemoMetric { kSed, kCosine };

// The k labeled logs closest to the target: ascending full-sequence edit
// distance, or descending log-embedding cosine. Ties to the smaller id.
DemoSet SelectDemosTopK(const LogRecord& target, std::span<const LabeledLog> labeled,
                        std::size_t k, DemoMetric metric, const WordEmbeddings& embeddings,
                        const SedOptions& options);

}  // namespace logtmpl

#endif  // LOGTMPL_DEMONSTRATION_HPP_
