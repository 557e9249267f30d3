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

// Prediction confidence: average word probability, word consistency, and
// their weighted combination. Larger scores mark logs the model finds hard.

#ifndef LOGTMPL_CONFIDENCE_HPP_
#define LOGTMPL_CONFIDENCE_HPP_

#include <string>
#include <vector>

#include "logtmpl/template.hpp"

namespace logtmpl {

struct Prediction {
  LogId log_id{};
  Template predicted;                        // empty when the response did not parse
  std::vector<std::string> regenerated_words;
  std::vector<double> word_probs;            // one per template token, in (0, 1]
  std::string raw_response;
  bool parsed = false;
  std::string error;                         // parse or gateway diagnostic
};

struct ConfidenceReport {
  LogId log_id{};
  double avg_prob = 0.0;
  int inconsistent = 1;
  double score = 1.0;
  double weight_a = 0.5;
  bool probabilities_missing = false;
};

// Arithmetic mean of the per-token probabilities. Throws kNoProbabilities.
double AverageWordProbability(const Prediction& prediction);

// 0 when the regenerated words equal the log's words exactly, else 1.
// Unparsed responses count as inconsistent.
int ConsistencyIndicator(const LogRecord& log, const Prediction& prediction);

// a * (1 - avg_prob) + (1 - a) * inconsistent. Missing probabilities score as
// avg_prob = 0 and are flagged. Throws kInvalidConfig unless a is in [0, 1].
ConfidenceReport ConfidenceScore(const LogRecord& log, const Prediction& prediction, double a);

}  // namespace logtmpl

#endif  // LOGTMPL_CONFIDENCE_HPP_
