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

// Prompt construction, response parsing, and the chat-completion gateways:
// a deterministic mock with fault injection, an OpenAI-compatible remote
// client, and transcript record/replay.

#ifndef LOGTMPL_LLM_GATEWAY_HPP_
#define LOGTMPL_LLM_GATEWAY_HPP_

#include <cstdint>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "logtmpl/confidence.hpp"
#include "logtmpl/demonstration.hpp"
#include "logtmpl/template.hpp"

namespace logtmpl {

struct ChatMessage {
  std::string role;
  std::string content;
};

struct Demonstration {
  std::string log_text;
  std::string template_text;
};

struct PromptBundle {
  std::string instruction;
  std::vector<Demonstration> demonstrations;
  std::string query_log;
  std::vector<std::string> uncovered_note;

  // Instruction, then examples, then the input log.
  std::string Render() const;
  // System message carries the instruction; the user message the rest.
  std::vector<ChatMessage> Messages() const;
};

PromptBundle BuildPrompt(const LogRecord& target, const DemoSet& demos, const TypeCatalog& catalog);

// Rough whitespace/4-character token estimate used for cost accounting when
// the service does not report usage.
std::size_t ApproxTokenCount(std::string_view text);

struct TokenLogprob {
  std::string token;
  double logprob = 0.0;
};

struct RawCompletion {
  std::string content;
  std::optional<std::vector<TokenLogprob>> logprobs;
  std::size_t prompt_tokens = 0;
};

struct InferenceRequest {
  LogId log_id{};
  int round = 0;
  PromptBundle prompt;
};

class LlmGateway {
 public:
  virtual ~LlmGateway() = default;
  // Throws kGatewayError on transport failure.
  virtual RawCompletion Complete(const InferenceRequest& request) = 0;
};

struct ParsedResponse {
  Template predicted;
  std::vector<std::string> words;
  // Character range of the template value inside the response text.
  std::size_t template_begin = 0;
  std::size_t template_end = 0;
};

// Reads the first TEMPLATE: and WORDS: lines (tags case-insensitive); other
// text is ignored. Throws kParseError.
ParsedResponse ParseResponse(std::string_view text, const TypeCatalog& catalog);

// One probability per template token: the geometric mean of the probabilities
// of the sub-tokens overlapping it. nullopt when the stream does not line up
// with the content or a token has no sub-token.
std::optional<std::vector<double>> AggregateTokenProbabilities(
    const std::string& content, const std::vector<TokenLogprob>& logprobs,
    const ParsedResponse& parsed);

// Runs one request end to end. Gateway and parse failures come back as an
// unparsed Prediction rather than an exception.
Prediction Infer(const InferenceRequest& request, LlmGateway& gateway, const TypeCatalog& catalog,
                 std::size_t* prompt_tokens = nullptr);

struct FaultProfile {
  double generation_error_rate = 0.0;
  double word_error_rate = 0.0;
  // Probability given to keyword tokens that no demonstration contains.
  double unseen_keyword_prob_penalty = 0.4;
  std::uint64_t seed = 0;

  void Validate() const;
};

// Answers from ground truth. Faults are drawn from (seed, log id) only:
//  - generation error: drops a suffix of the words and template (or invents a
//    word for one-word logs); the last emitted token gets the penalty.
//  - word error: one placeholder is emitted as its literal word instead.
class MockGateway final : public LlmGateway {
 public:
  MockGateway(std::vector<LabeledLog> ground_truth, FaultProfile profile);

  RawCompletion Complete(const InferenceRequest& request) override;

  struct FaultDraw {
    bool generation_error = false;
    bool word_error = false;
    std::uint64_t pick = 0;
  };
  FaultDraw Draw(LogId id) const;

 private:
  std::unordered_map<LogId, LabeledLog> truth_;
  FaultProfile profile_;
};

struct RemoteGatewayConfig {
  std::string endpoint;  // e.g. "http://localhost:8000/v1"
  std::string model = "gpt-4o";
  std::string api_key_env = "LOGTMPL_API_KEY";
  double temperature = 0.0;
  int max_attempts = 3;
  int initial_backoff_ms = 200;
  int timeout_seconds = 60;
};

class RemoteGateway final : public LlmGateway {
 public:
  explicit RemoteGateway(RemoteGatewayConfig config);
  RawCompletion Complete(const InferenceRequest& request) override;

 private:
  RemoteGatewayConfig config_;
};

// Parses an OpenAI-compatible chat-completions response body.
RawCompletion ParseChatCompletionBody(const std::string& body);

// Appends every exchange of the wrapped gateway to a JSON-lines file.
class TranscriptRecorder final : public LlmGateway {
 public:
  TranscriptRecorder(LlmGateway& inner, const std::string& path);
  RawCompletion Complete(const InferenceRequest& request) override;

 private:
  LlmGateway& inner_;
  std::mutex mutex_;
  std::ofstream out_;
};

// Serves recorded responses keyed by (log id, round).
class TranscriptReplayer final : public LlmGateway {
 public:
  explicit TranscriptReplayer(const std::string& path);
  RawCompletion Complete(const InferenceRequest& request) override;
  std::size_t size() const { return responses_.size(); }

 private:
  std::map<std::pair<std::uint32_t, int>, RawCompletion> responses_;
};

}  // namespace logtmpl

#endif  // LOGTMPL_LLM_GATEWAY_HPP_
