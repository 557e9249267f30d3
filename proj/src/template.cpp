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

#include "logtmpl/template.hpp"

#include <cctype>

#include "logtmpl/error.hpp"

namespace logtmpl {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kUnknownType: return "UnknownType";
    case ErrorCode::kEmptyTemplate: return "EmptyTemplate";
    case ErrorCode::kEmptyLog: return "EmptyLog";
    case ErrorCode::kEmptyWord: return "EmptyWord";
    case ErrorCode::kProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kInvalidDelta: return "InvalidDelta";
    case ErrorCode::kInvalidWordCounts: return "InvalidWordCounts";
    case ErrorCode::kNoProbabilities: return "NoProbabilities";
    case ErrorCode::kGatewayError: return "GatewayError";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kFormatError: return "FormatError";
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kNoGroundTruth: return "NoGroundTruth";
    case ErrorCode::kAnnotatorUnavailable: return "AnnotatorUnavailable";
    case ErrorCode::kUnknownId: return "UnknownId";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

std::vector<std::string> SplitWhitespace(std::string_view text) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    if (i > start) out.emplace_back(text.substr(start, i - start));
  }
  return out;
}

std::string LogRecord::JoinedWords() const {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

std::string TemplateToken::Render() const {
  return is_placeholder() ? "[" + value + "]" : "<" + value + ">";
}

std::string Template::Render() const {
  std::string out;
  for (const auto& token : tokens) {
    if (!out.empty()) out += ' ';
    out += token.Render();
  }
  return out;
}

TypeCatalog TypeCatalog::Default() {
  return TypeCatalog({"DATE", "TIME", "IP", "PATH", "ID", "NUM", "VAR", "STATUS",
                      "LATENCY", "RESOURCE", "CODE", "ADDRESS"});
}

bool TypeCatalog::HasType(std::string_view name) const {
  return types_.find(name) != types_.end();
}

void TypeCatalog::AddKeywordsFrom(const Template& t) {
  for (const auto& token : t.tokens) {
    if (token.is_keyword()) keywords_.insert(token.value);
  }
}

LogRecord TokenizeLog(std::string_view raw, LogId id) {
  LogRecord record;
  record.id = id;
  record.words = SplitWhitespace(raw);
  if (record.words.empty()) throw Error(ErrorCode::kEmptyLog, "blank log line");
  record.raw = std::string(raw);
  return record;
}

namespace {

Template ParseTemplateImpl(std::string_view text, const TypeCatalog* catalog) {
  Template t;
  for (auto& piece : SplitWhitespace(text)) {
    const bool bracketed = piece.size() > 2 && piece.front() == '[' && piece.back() == ']';
    const bool angled = piece.size() > 2 && piece.front() == '<' && piece.back() == '>';
    if (bracketed) {
      std::string name = piece.substr(1, piece.size() - 2);
      if (catalog && !catalog->HasType(name)) {
        throw Error(ErrorCode::kUnknownType, "type '" + name + "' is not in the catalog");
      }
      t.tokens.push_back(TemplateToken::Placeholder(std::move(name)));
    } else if (angled) {
      t.tokens.push_back(TemplateToken::Keyword(piece.substr(1, piece.size() - 2)));
    } else {
      t.tokens.push_back(TemplateToken::Keyword(std::move(piece)));
    }
  }
  if (t.empty()) throw Error(ErrorCode::kEmptyTemplate, "template has no tokens");
  return t;
}

}  // namespace

Template ParseTemplate(std::string_view text, const TypeCatalog& catalog) {
  return ParseTemplateImpl(text, &catalog);
}

Template ParseTemplate(std::string_view text) { return ParseTemplateImpl(text, nullptr); }

bool TemplateMatches(const LogRecord& log, const Template& t) {
  if (log.words.size() != t.tokens.size()) return false;
  for (std::size_t i = 0; i < t.tokens.size(); ++i) {
    const auto& token = t.tokens[i];
    if (token.is_keyword() && token.value != log.words[i]) return false;
  }
  return true;
}

}  // namespace logtmpl
