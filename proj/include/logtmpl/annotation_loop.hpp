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

// The multi-round annotation driver and its persisted run state.

#ifndef LOGTMPL_ANNOTATION_LOOP_HPP_
#define LOGTMPL_ANNOTATION_LOOP_HPP_

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "logtmpl/confidence.hpp"
#include "logtmpl/corpus.hpp"
#include "logtmpl/demonstration.hpp"
#include "logtmpl/embedding.hpp"
#include "logtmpl/llm_gateway.hpp"
#include "logtmpl/selection.hpp"

namespace logtmpl {

enum class DemoMode { kAdaptive, kTopK };

struct LoopConfig {
  std::size_t budget = 50;
  double lambda = 0.5;
  double delta = 0.5;
  double a = 0.5;
  double tau = 0.0;
  bool inverted_word_cost = false;
  std::size_t b0 = 0;  // 0: StartupBudgets(budget)
  std::size_t b1 = 0;
  DemoMode demo_mode = DemoMode::kAdaptive;
  std::size_t k_c = 5;
  DemoMetric topk_metric = DemoMetric::kSed;
  std::size_t concurrency = 4;

  std::size_t startup_b0() const;
  std::size_t startup_b1() const;
  // Throws kInvalidConfig.
  void Validate() const;
};

struct PendingItem {
  LogId id{};
  std::string raw;
  std::optional<Template> guess;
};

class Annotator {
 public:
  virtual ~Annotator() = default;
  // One template per item, in item order. Throws kAnnotatorUnavailable.
  virtual std::vector<Template> Annotate(int round, std::span<const PendingItem> items) = 0;
};

// Answers from the corpus ground truth.
class OracleAnnotator final : public Annotator {
 public:
  explicit OracleAnnotator(const Corpus& corpus) : corpus_(corpus) {}
  std::vector<Template> Annotate(int round, std::span<const PendingItem> items) override;

 private:
  const Corpus& corpus_;
};

struct RoundState {
  int index = 0;
  std::size_t budget = 0;
  std::vector<LogId> selected;
  std::size_t covered_words = 0;  // distinct words across labeled logs after this round
  // Predictions that drove this round's selection (empty for round 0).
  std::vector<ConfidenceReport> confidence;
  std::vector<GreedyStep> trace;
  std::size_t prompt_tokens = 0;

  double MeanConfidence() const;
  std::size_t CountConfidenceAbove(double threshold) const;
};

struct RunState {
  static constexpr int kSchemaVersion = 1;

  LoopConfig config;
  std::vector<LabeledLog> labeled;
  std::vector<LogId> unlabeled;
  std::vector<RoundState> rounds;
  std::size_t budget_remaining = 0;
  std::size_t total_prompt_tokens = 0;
  bool finished = false;

  // Final prediction pass over the logs still unlabeled. Not persisted.
  std::map<LogId, Prediction> predictions;
  std::vector<ConfidenceReport> final_confidence;

  // Every log's template: annotations for labeled logs, predictions otherwise.
  std::map<LogId, Template> AllTemplates() const;
};

std::string RunStateToJson(const RunState& state);
// Throws kFormatError.
RunState RunStateFromJson(const std::string& text, const Corpus& corpus);
// Temp file plus rename.
void SaveRunStateAtomic(const RunState& state, const std::string& path);
RunState LoadRunState(const std::string& path, const Corpus& corpus);

// B0 and B1 for the first two rounds, then the adaptive rule on the last two
// rounds' identified-word counts, capped by the remaining budget.
std::size_t NextRoundBudget(const RunState& state);

struct LoopHooks {
  std::function<void(const RunState&)> on_round;
  std::function<void(const std::string&)> log;
  // Every prediction pass, before selection (and before the final finish).
  std::function<void(int round, const std::vector<Prediction>&,
                     const std::vector<ConfidenceReport>&)>
      on_predictions;
};

// Predicts every target with per-target demonstrations, in parallel up to
// config.concurrency. Output order follows `targets`.
std::vector<Prediction> PredictAll(std::span<const LogRecord> targets,
                                   std::span<const LabeledLog> labeled, int round,
                                   const LoopConfig& config, const TypeCatalog& catalog,
                                   const WordEmbeddings& embeddings, LlmGateway& gateway,
                                   std::size_t* prompt_tokens = nullptr);

// Diversity-seeded first round, then rounds of predict -> budget -> greedy
// select -> annotate until the budget or the unlabeled pool runs out, and a
// final prediction pass. Passing `resume` continues a persisted run.
RunState RunAnnotationLoop(const Corpus& corpus, Annotator& annotator, LlmGateway& gateway,
                           const WordEmbeddings& embeddings, const LoopConfig& config,
                           const LoopHooks& hooks = {},
                           std::optional<RunState> resume = std::nullopt);

}  // namespace logtmpl

#endif  // LOGTMPL_ANNOTATION_LOOP_HPP_
