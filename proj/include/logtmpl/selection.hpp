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

// Budgeted annotation selection: the coverage-plus-confidence objective, its
// greedy maximizer, the adaptive per-round budget, and the diversity seed.

#ifndef LOGTMPL_SELECTION_HPP_
#define LOGTMPL_SELECTION_HPP_

#include <map>
#include <set>
#include <span>
#include <utility>
#include <vector>

#include "logtmpl/embedding.hpp"
#include "logtmpl/similarity.hpp"
#include "logtmpl/template.hpp"

namespace logtmpl {

using RepresentativeMap = std::map<LogId, RepresentativeSet>;
using ConfidenceMap = std::map<LogId, double>;

// Running state of IS(chosen) = (1 - lambda) * |union of I_s| / |U|
//                             + lambda * sum of C(s).
struct SelectionObjective {
  double lambda = 0.5;
  std::size_t universe_size = 1;
  std::set<LogId> coverage;
  double confidence_sum = 0.0;
  std::vector<LogId> chosen;

  double Value() const;
};

double ObjectiveValue(std::span<const LogId> chosen, const RepresentativeMap& reps,
                      const ConfidenceMap& conf, double lambda, std::size_t universe);

// IS(chosen + s) - IS(chosen).
double MarginalGain(LogId s, const SelectionObjective& current, const RepresentativeMap& reps,
                    const ConfidenceMap& conf);

void AddToObjective(LogId s, SelectionObjective& current, const RepresentativeMap& reps,
                    const ConfidenceMap& conf);

struct GreedyStep {
  LogId pick{};
  double gain = 0.0;
  double value_after = 0.0;
};

struct GreedyTrace {
  std::vector<GreedyStep> steps;
  std::vector<LogId> Selected() const;
};

// Picks min(budget, |candidates|) logs, each the argmax marginal gain with
// ties to the lowest id.
GreedyTrace GreedySelect(std::span<const LogId> candidates, const RepresentativeMap& reps,
                         const ConfidenceMap& conf, double lambda, std::size_t universe,
                         std::size_t budget);

struct SelectionConfig {
  double lambda = 0.5;
  double delta = 0.5;
};

// One annotation round: representative sets of every unlabeled log over the
// unlabeled pool, then greedy selection under the round budget.
GreedyTrace SelectRound(std::span<const LogRecord> unlabeled, const ConfidenceMap& confidence,
                        std::size_t budget, const SelectionConfig& config,
                        const SedEngine& engine);

// floor(b_prev * (1 - (w_prev - w_prev2) / w_prev)), clamped to the remaining
// budget and raised to 1 while budget remains. Throws kInvalidWordCounts
// unless w_prev >= w_prev2 >= 0 and w_prev > 0.
std::size_t AdaptiveBudget(std::size_t b_prev, std::size_t w_prev, std::size_t w_prev2,
                           std::size_t b_remaining);

// Budgets of the two fixed startup rounds: (10, 10) for B = 50, (50, 25) for
// B = 200, otherwise (B/4, B/8) with each at least 1.
std::pair<std::size_t, std::size_t> StartupBudgets(std::size_t total_budget);

// Farthest-first traversal in log-embedding space, seeded with the log whose
// embedding is closest to the corpus centroid. Distance is 1 - cosine.
std::vector<LogId> DiversityInit(std::span<const LogRecord> corpus, std::size_t count,
                                 const WordEmbeddings& embeddings);

}  // namespace logtmpl

#endif  // LOGTMPL_SELECTION_HPP_
