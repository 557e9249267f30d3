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

#include "logtmpl/confidence.hpp"

#include <numeric>

#include "logtmpl/error.hpp"

namespace logtmpl {

double AverageWordProbability(const Prediction& prediction) {
  if (prediction.word_probs.empty()) {
    throw Error(ErrorCode::kNoProbabilities,
                "no token probabilities for log " + std::to_string(Index(prediction.log_id)));
  }
  const double sum =
      std::accumulate(prediction.word_probs.begin(), prediction.word_probs.end(), 0.0);
  return sum / static_cast<double>(prediction.word_probs.size());
}

int ConsistencyIndicator(const LogRecord& log, const Prediction& prediction) {
  if (!prediction.parsed) return 1;
  return prediction.regenerated_words == log.words ? 0 : 1;
}

ConfidenceReport ConfidenceScore(const LogRecord& log, const Prediction& prediction, double a) {
  if (!(a >= 0.0 && a <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "confidence weight a must lie in [0, 1]");
  }
  ConfidenceReport report;
  report.log_id = log.id;
  report.weight_a = a;
  report.inconsistent = ConsistencyIndicator(log, prediction);
  if (prediction.parsed && !prediction.word_probs.empty()) {
    report.avg_prob = AverageWordProbability(prediction);
  } else {
    report.avg_prob = 0.0;
    report.probabilities_missing = true;
  }
  report.score = a * (1.0 - report.avg_prob) + (1.0 - a) * report.inconsistent;
  return report;
}

}  // namespace logtmpl
