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

#include "logtmpl/selection.hpp"

#include <algorithm>
#include <limits>

#include "logtmpl/error.hpp"

namespace logtmpl {
namespace {

double ConfidenceOf(LogId s, const ConfidenceMap& conf) {
  auto it = conf.find(s);
  return it == conf.end() ? 0.0 : it->second;
}

const std::vector<LogId>& MembersOf(LogId s, const RepresentativeMap& reps) {
  static const std::vector<LogId> kEmpty;
  auto it = reps.find(s);
  return it == reps.end() ? kEmpty : it->second.members;
}

}  // namespace

double SelectionObjective::Value() const {
  if (chosen.empty()) return 0.0;
  return (1.0 - lambda) * static_cast<double>(coverage.size()) /
             static_cast<double>(universe_size) +
         lambda * confidence_sum;
}

double ObjectiveValue(std::span<const LogId> chosen, const RepresentativeMap& reps,
                      const ConfidenceMap& conf, double lambda, std::size_t universe) {
  SelectionObjective objective{lambda, universe, {}, 0.0, {}};
  for (LogId s : chosen) {
    if (std::find(objective.chosen.begin(), objective.chosen.end(), s) != objective.chosen.end()) {
      continue;
    }
    AddToObjective(s, objective, reps, conf);
  }
  return objective.Value();
}

double MarginalGain(LogId s, const SelectionObjective& current, const RepresentativeMap& reps,
                    const ConfidenceMap& conf) {
  std::size_t fresh = 0;
  for (LogId m : MembersOf(s, reps)) fresh += !current.coverage.contains(m);
  return (1.0 - current.lambda) * static_cast<double>(fresh) /
             static_cast<double>(current.universe_size) +
         current.lambda * ConfidenceOf(s, conf);
}

void AddToObjective(LogId s, SelectionObjective& current, const RepresentativeMap& reps,
                    const ConfidenceMap& conf) {
  for (LogId m : MembersOf(s, reps)) current.coverage.insert(m);
  current.confidence_sum += ConfidenceOf(s, conf);
  current.chosen.push_back(s);
}

std::vector<LogId> GreedyTrace::Selected() const {
  std::vector<LogId> out;
  out.reserve(steps.size());
  for (const auto& step : steps) out.push_back(step.pick);
  return out;
}

GreedyTrace GreedySelect(std::span<const LogId> candidates, const RepresentativeMap& reps,
                         const ConfidenceMap& conf, double lambda, std::size_t universe,
                         std::size_t budget) {
  if (universe == 0) throw Error(ErrorCode::kInvalidConfig, "selection universe must be non-empty");
  std::vector<LogId> pool(candidates.begin(), candidates.end());
  std::sort(pool.begin(), pool.end());
  pool.erase(std::unique(pool.begin(), pool.end()), pool.end());

  SelectionObjective objective{lambda, universe, {}, 0.0, {}};
  GreedyTrace trace;
  std::vector<bool> taken(pool.size(), false);
  const std::size_t picks = std::min(budget, pool.size());
  for (std::size_t round = 0; round < picks; ++round) {
    std::size_t best = pool.size();
    double best_gain = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < pool.size(); ++i) {
      if (taken[i]) continue;
      const double gain = MarginalGain(pool[i], objective, reps, conf);
      if (gain > best_gain) {
        best_gain = gain;
        best = i;
      }
    }
    taken[best] = true;
    AddToObjective(pool[best], objective, reps, conf);
    trace.steps.push_back({pool[best], best_gain, objective.Value()});
  }
  return trace;
}

GreedyTrace SelectRound(std::span<const LogRecord> unlabeled, const ConfidenceMap& confidence,
                        std::size_t budget, const SelectionConfig& config,
                        const SedEngine& engine) {
  if (budget == 0 || unlabeled.empty()) return {};
  const auto reps = engine.AllRepresentatives(unlabeled, config.delta);
  std::vector<LogId> ids;
  ids.reserve(unlabeled.size());
  for (const auto& s : unlabeled) ids.push_back(s.id);
  return GreedySelect(ids, reps, confidence, config.lambda, unlabeled.size(), budget);
}

std::size_t AdaptiveBudget(std::size_t b_prev, std::size_t w_prev, std::size_t w_prev2,
                           std::size_t b_remaining) {
  if (w_prev == 0 || w_prev < w_prev2) {
    throw Error(ErrorCode::kInvalidWordCounts,
                "need W[r-1] >= W[r-2] >= 0 and W[r-1] > 0, got " + std::to_string(w_prev) +
                    " and " + std::to_string(w_prev2));
  }
  // b_prev * (1 - dW / w_prev) == b_prev * w_prev2 / w_prev, floored exactly.
  std::size_t b = b_prev * w_prev2 / w_prev;
  b = std::min(b, b_remaining);
  if (b == 0 && b_remaining > 0) b = 1;
  return b;
}

std::pair<std::size_t, std::size_t> StartupBudgets(std::size_t total_budget) {
  if (total_budget == 50) return {10, 10};
  if (total_budget == 200) return {50, 25};
  return {std::max<std::size_t>(1, total_budget / 4), std::max<std::size_t>(1, total_budget / 8)};
}

std::vector<LogId> DiversityInit(std::span<const LogRecord> corpus, std::size_t count,
                                 const WordEmbeddings& embeddings) {
  count = std::min(count, corpus.size());
  if (count == 0) return {};

  std::vector<std::size_t> order(corpus.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return corpus[a].id < corpus[b].id; });

  std::vector<EmbeddingVector> vecs;
  vecs.reserve(corpus.size());
  for (std::size_t i : order) vecs.push_back(embeddings.EmbedLog(corpus[i]));

  std::vector<double> centroid(vecs.front().dimension(), 0.0);
  for (const auto& v : vecs) {
    auto values = v.values();
    for (std::size_t d = 0; d < centroid.size(); ++d) centroid[d] += values[d];
  }
  EmbeddingVector center(std::move(centroid));

  std::size_t seed = 0;
  if (center.Norm() > 0.0) {
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      const double c = Cosine(vecs[i], center);
      if (c > best) {
        best = c;
        seed = i;
      }
    }
  }

  std::vector<LogId> chosen{corpus[order[seed]].id};
  std::vector<double> min_dist(vecs.size(), std::numeric_limits<double>::infinity());
  std::vector<bool> taken(vecs.size(), false);
  taken[seed] = true;
  std::size_t last = seed;
  while (chosen.size() < count) {
    std::size_t best = vecs.size();
    double best_dist = -1.0;
    for (std::size_t i = 0; i < vecs.size(); ++i) {
      if (taken[i]) continue;
      min_dist[i] = std::min(min_dist[i], 1.0 - Cosine(vecs[i], vecs[last]));
      if (min_dist[i] > best_dist) {
        best_dist = min_dist[i];
        best = i;
      }
    }
    taken[best] = true;
    last = best;
    chosen.push_back(corpus[order[best]].id);
  }
  return chosen;
}

}  // namespace logtmpl
