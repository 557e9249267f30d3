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

#include "logtmpl/llm_gateway.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <random>

#include <json.hpp>

#include "logtmpl/error.hpp"

namespace logtmpl {

using nlohmann::json;

namespace {

std::string JoinWords(const std::vector<std::string>& words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

bool StartsWithTag(std::string_view line, std::string_view tag) {
  if (line.size() < tag.size()) return false;
  for (std::size_t i = 0; i < tag.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(line[i])) != tag[i]) return false;
  }
  return true;
}

struct TaggedLine {
  std::size_t value_begin = 0;
  std::size_t value_end = 0;
};

// First line whose left-trimmed text starts with `tag` (lower case, with colon).
std::optional<TaggedLine> FindTaggedLine(std::string_view text, std::string_view tag) {
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::size_t start = pos;
    while (start < end && std::isspace(static_cast<unsigned char>(text[start]))) ++start;
    if (StartsWithTag(text.substr(start, end - start), tag)) {
      std::size_t value_end = end;
      if (value_end > start && text[value_end - 1] == '\r') --value_end;
      return TaggedLine{start + tag.size(), value_end};
    }
    if (end == text.size()) break;
    pos = end + 1;
  }
  return std::nullopt;
}

constexpr std::string_view kOutputContract =
    "Answer with exactly two lines and nothing else:\n"
    "TEMPLATE: <one template token per input word, separated by single spaces>\n"
    "WORDS: <the input log words copied verbatim, in order, separated by single spaces>";

}  // namespace

std::string PromptBundle::Render() const {
  std::string out = instruction;
  for (const auto& m : Messages()) {
    if (m.role == "user") out += "\n\n" + m.content;
  }
  return out;
}

std::vector<ChatMessage> PromptBundle::Messages() const {
  std::string user;
  if (!demonstrations.empty()) {
    user += "Examples:\n";
    for (const auto& d : demonstrations) {
      user += "Log: " + d.log_text + "\n";
      user += "TEMPLATE: " + d.template_text + "\n";
      user += "WORDS: " + d.log_text + "\n\n";
    }
  }
  if (!uncovered_note.empty()) {
    user += "Caution: no example contains a word similar to: " + JoinWords(uncovered_note) +
            ". Decide their types from context.\n\n";
  }
  user += "Input log: " + query_log;
  return {{"system", instruction}, {"user", user}};
}

PromptBundle BuildPrompt(const LogRecord& target, const DemoSet& demos,
                         const TypeCatalog& catalog) {
  PromptBundle p;
  std::string types;
  for (const auto& t : catalog.types()) {
    if (!types.empty()) types += ' ';
    types += "[" + t + "]";
  }
  p.instruction =
      "You convert raw system log lines into templates. Replace every variable word with its "
      "type placeholder in square brackets, chosen from: " +
      types +
      ". Keep every constant word as a keyword wrapped in angle brackets, for example <GET>. "
      "The template has exactly one token per word of the input log, in the same order.\n" +
      std::string(kOutputContract);
  for (const auto& d : demos.demos) {
    p.demonstrations.push_back({d.log.JoinedWords(), d.label.Render()});
  }
  p.uncovered_note.assign(demos.uncovered.begin(), demos.uncovered.end());
  p.query_log = target.JoinedWords();
  return p;
}

std::size_t ApproxTokenCount(std::string_view text) {
  std::size_t count = 0;
  for (const auto& w : SplitWhitespace(text)) count += (w.size() + 3) / 4;
  return count;
}

ParsedResponse ParseResponse(std::string_view text, const TypeCatalog& catalog) {
  const auto tline = FindTaggedLine(text, "template:");
  if (!tline) throw Error(ErrorCode::kParseError, "response has no TEMPLATE line");
  const auto wline = FindTaggedLine(text, "words:");
  if (!wline) throw Error(ErrorCode::kParseError, "response has no WORDS line");

  ParsedResponse out;
  out.template_begin = tline->value_begin;
  out.template_end = tline->value_end;
  try {
    out.predicted = ParseTemplate(text.substr(tline->value_begin,
                                              tline->value_end - tline->value_begin),
                                  catalog);
  } catch (const Error& e) {
    throw Error(ErrorCode::kParseError, std::string("bad template: ") + e.what());
  }
  out.words = SplitWhitespace(text.substr(wline->value_begin, wline->value_end - wline->value_begin));
  return out;
}

std::optional<std::vector<double>> AggregateTokenProbabilities(
    const std::string& content, const std::vector<TokenLogprob>& logprobs,
    const ParsedResponse& parsed) {
  std::vector<std::size_t> offsets;
  offsets.reserve(logprobs.size());
  std::string joined;
  for (const auto& t : logprobs) {
    offsets.push_back(joined.size());
    joined += t.token;
  }
  if (joined != content) return std::nullopt;

  // Spans of the template tokens inside the content.
  std::vector<std::pair<std::size_t, std::size_t>> spans;
  std::size_t i = parsed.template_begin;
  while (i < parsed.template_end) {
    while (i < parsed.template_end && std::isspace(static_cast<unsigned char>(content[i]))) ++i;
    const std::size_t start = i;
    while (i < parsed.template_end && !std::isspace(static_cast<unsigned char>(content[i]))) ++i;
    if (i > start) spans.emplace_back(start, i);
  }
  if (spans.size() != parsed.predicted.size()) return std::nullopt;

  std::vector<double> probs;
  probs.reserve(spans.size());
  std::size_t first = 0;
  for (const auto& [begin, end] : spans) {
    while (first < logprobs.size() && offsets[first] + logprobs[first].token.size() <= begin) {
      ++first;
    }
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t k = first; k < logprobs.size() && offsets[k] < end; ++k) {
      if (logprobs[k].token.empty()) continue;
      sum += std::min(0.0, logprobs[k].logprob);
      ++n;
    }
    if (n == 0) return std::nullopt;
    probs.push_back(std::max(1e-12, std::exp(sum / static_cast<double>(n))));
  }
  return probs;
}

Prediction Infer(const InferenceRequest& request, LlmGateway& gateway, const TypeCatalog& catalog,
                 std::size_t* prompt_tokens) {
  Prediction p;
  p.log_id = request.log_id;
  RawCompletion raw;
  try {
    raw = gateway.Complete(request);
  } catch (const Error& e) {
    p.error = e.what();
    if (prompt_tokens) *prompt_tokens = ApproxTokenCount(request.prompt.Render());
    return p;
  }
  if (prompt_tokens) {
    *prompt_tokens = raw.prompt_tokens ? raw.prompt_tokens : ApproxTokenCount(request.prompt.Render());
  }
  p.raw_response = raw.content;
  try {
    auto parsed = ParseResponse(raw.content, catalog);
    p.predicted = std::move(parsed.predicted);
    p.regenerated_words = std::move(parsed.words);
    p.parsed = true;
    parsed.predicted = p.predicted;
    if (raw.logprobs) {
      if (auto probs = AggregateTokenProbabilities(raw.content, *raw.logprobs, parsed)) {
        p.word_probs = std::move(*probs);
      }
    }
  } catch (const Error& e) {
    p.error = e.what();
  }
  return p;
}

void FaultProfile::Validate() const {
  auto in_unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!in_unit(generation_error_rate) || !in_unit(word_error_rate)) {
    throw Error(ErrorCode::kInvalidConfig, "fault rates must lie in [0, 1]");
  }
  if (!(unseen_keyword_prob_penalty > 0.0 && unseen_keyword_prob_penalty <= 1.0)) {
    throw Error(ErrorCode::kInvalidConfig, "unseen keyword probability must lie in (0, 1]");
  }
}

MockGateway::MockGateway(std::vector<LabeledLog> ground_truth, FaultProfile profile)
    : profile_(profile) {
  profile_.Validate();
  for (auto& l : ground_truth) {
    const LogId id = l.log.id;
    truth_.insert_or_assign(id, std::move(l));
  }
}

MockGateway::FaultDraw MockGateway::Draw(LogId id) const {
  std::mt19937_64 rng(profile_.seed ^ (0x9e3779b97f4a7c15ULL * (Index(id) + 1ULL)));
  auto unit = [&rng] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  FaultDraw d;
  d.generation_error = unit() < profile_.generation_error_rate;
  d.word_error = unit() < profile_.word_error_rate;
  d.pick = rng();
  return d;
}

RawCompletion MockGateway::Complete(const InferenceRequest& request) {
  auto it = truth_.find(request.log_id);
  if (it == truth_.end()) {
    throw Error(ErrorCode::kGatewayError,
                "mock has no ground truth for log " + std::to_string(Index(request.log_id)));
  }
  const auto& truth = it->second;
  std::vector<TemplateToken> tokens = truth.label.tokens;
  std::vector<std::string> words = truth.log.words;

  std::vector<std::string> demo_words;
  for (const auto& d : request.prompt.demonstrations) {
    for (auto& w : SplitWhitespace(d.log_text)) demo_words.push_back(std::move(w));
  }
  std::sort(demo_words.begin(), demo_words.end());

  const FaultDraw draw = Draw(request.log_id);
  if (draw.word_error) {
    std::vector<std::size_t> slots;
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      if (tokens[i].is_placeholder() && i < words.size()) slots.push_back(i);
    }
    if (!slots.empty()) {
      const std::size_t i = slots[draw.pick % slots.size()];
      tokens[i] = TemplateToken::Keyword(words[i]);
    }
  }

  std::vector<double> probs;
  for (const auto& t : tokens) {
    const bool unseen =
        t.is_keyword() && !std::binary_search(demo_words.begin(), demo_words.end(), t.value);
    probs.push_back(unseen ? profile_.unseen_keyword_prob_penalty : 1.0);
  }

  if (draw.generation_error) {
    if (tokens.size() >= 2 && words.size() >= 2) {
      const std::size_t max_drop = std::min<std::size_t>(3, tokens.size() - 1);
      const std::size_t drop = 1 + (draw.pick >> 8) % max_drop;
      tokens.resize(tokens.size() - drop);
      probs.resize(tokens.size());
      words.resize(words.size() - std::min(drop, words.size() - 1));
    } else {
      tokens.push_back(TemplateToken::Keyword("unknown"));
      words.push_back("unknown");
      probs.push_back(1.0);
    }
    probs.back() = std::min(probs.back(), profile_.unseen_keyword_prob_penalty);
  }

  RawCompletion out;
  out.logprobs.emplace();
  auto emit = [&out](std::string text, double logprob) {
    out.content += text;
    out.logprobs->push_back({std::move(text), logprob});
  };
  emit("TEMPLATE:", 0.0);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    // Split each rendered token into sub-tokens of up to four characters.
    const std::string rendered = tokens[i].Render();
    const double lp = std::log(probs[i]);
    emit(" ", 0.0);
    for (std::size_t k = 0; k < rendered.size(); k += 4) emit(rendered.substr(k, 4), lp);
  }
  emit("\n", 0.0);
  emit("WORDS:", 0.0);
  for (const auto& w : words) emit(" " + w, 0.0);
  out.prompt_tokens = ApproxTokenCount(request.prompt.Render());
  return out;
}

namespace {

json MessagesJson(const PromptBundle& prompt) {
  json messages = json::array();
  for (const auto& m : prompt.Messages()) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  return messages;
}

json CompletionJson(const RawCompletion& c) {
  json out = {{"content", c.content}, {"prompt_tokens", c.prompt_tokens}};
  if (c.logprobs) {
    json lp = json::array();
    for (const auto& t : *c.logprobs) lp.push_back({{"token", t.token}, {"logprob", t.logprob}});
    out["logprobs"] = std::move(lp);
  } else {
    out["logprobs"] = nullptr;
  }
  return out;
}

RawCompletion CompletionFromJson(const json& j) {
  RawCompletion c;
  c.content = j.at("content").get<std::string>();
  c.prompt_tokens = j.value("prompt_tokens", std::size_t{0});
  if (j.contains("logprobs") && j.at("logprobs").is_array()) {
    c.logprobs.emplace();
    for (const auto& t : j.at("logprobs")) {
      c.logprobs->push_back({t.at("token").get<std::string>(), t.at("logprob").get<double>()});
    }
  }
  return c;
}

}  // namespace

RawCompletion ParseChatCompletionBody(const std::string& body) {
  try {
    const auto j = json::parse(body);
    const auto& choice = j.at("choices").at(0);
    RawCompletion c;
    c.content = choice.at("message").at("content").get<std::string>();
    if (choice.contains("logprobs") && choice.at("logprobs").is_object() &&
        choice.at("logprobs").contains("content") &&
        choice.at("logprobs").at("content").is_array()) {
      c.logprobs.emplace();
      for (const auto& t : choice.at("logprobs").at("content")) {
        c.logprobs->push_back({t.at("token").get<std::string>(), t.at("logprob").get<double>()});
      }
    }
    if (j.contains("usage") && j.at("usage").is_object()) {
      c.prompt_tokens = j.at("usage").value("prompt_tokens", std::size_t{0});
    }
    return c;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kGatewayError, std::string("malformed chat completion: ") + e.what());
  }
}

TranscriptRecorder::TranscriptRecorder(LlmGateway& inner, const std::string& path)
    : inner_(inner), out_(path, std::ios::app) {
  if (!out_) throw Error(ErrorCode::kIoError, "cannot open transcript " + path);
}

RawCompletion TranscriptRecorder::Complete(const InferenceRequest& request) {
  RawCompletion c = inner_.Complete(request);
  json line = {{"log_id", Index(request.log_id)},
               {"round", request.round},
               {"request", {{"messages", MessagesJson(request.prompt)}}},
               {"response", CompletionJson(c)}};
  std::lock_guard lock(mutex_);
  out_ << line.dump() << '\n';
  out_.flush();
  return c;
}

TranscriptReplayer::TranscriptReplayer(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open transcript " + path);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      responses_[{j.at("log_id").get<std::uint32_t>(), j.at("round").get<int>()}] =
          CompletionFromJson(j.at("response"));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatError,
                  path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
}

RawCompletion TranscriptReplayer::Complete(const InferenceRequest& request) {
  auto it = responses_.find({Index(request.log_id), request.round});
  if (it == responses_.end()) {
    throw Error(ErrorCode::kGatewayError, "transcript has no response for log " +
                                              std::to_string(Index(request.log_id)) +
                                              " round " + std::to_string(request.round));
  }
  return it->second;
}

}  // namespace logtmpl
