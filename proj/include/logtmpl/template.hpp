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

// Core value types: raw log records, templates, and the type catalog.

#ifndef LOGTMPL_TEMPLATE_HPP_
#define LOGTMPL_TEMPLATE_HPP_

#include <compare>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace logtmpl {

// Stable identifier of a log within a corpus. Ordering by id is the global
// tie-break rule for every greedy choice in the library.
enum class LogId : std::uint32_t {};

constexpr std::uint32_t Index(LogId id) { return static_cast<std::uint32_t>(id); }

struct LogRecord {
  LogId id{};
  std::vector<std::string> words;
  std::string raw;

  std::string JoinedWords() const;
};

struct TemplateToken {
  enum class Kind { kTypePlaceholder, kKeyword };

  Kind kind = Kind::kKeyword;
  // Type name for placeholders, the literal word for keywords.
  std::string value;

  static TemplateToken Placeholder(std::string type_name) {
    return {Kind::kTypePlaceholder, std::move(type_name)};
  }
  static TemplateToken Keyword(std::string word) {
    return {Kind::kKeyword, std::move(word)};
  }

  bool is_placeholder() const { return kind == Kind::kTypePlaceholder; }
  bool is_keyword() const { return kind == Kind::kKeyword; }

  // "[NAME]" or "<word>".
  std::string Render() const;

  friend bool operator==(const TemplateToken&, const TemplateToken&) = default;
};

struct Template {
  std::vector<TemplateToken> tokens;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }

  // Canonical form: tokens rendered and joined by a single space.
  std::string Render() const;

  friend bool operator==(const Template&, const Template&) = default;
};

// A log together with its annotated template.
struct LabeledLog {
  LogRecord log;
  Template label;
};

// The candidate word types are fixed for a run; keywords only accumulate.
class TypeCatalog {
 public:
  TypeCatalog() = default;
  explicit TypeCatalog(const std::set<std::string>& types) : types_(types.begin(), types.end()) {}

  // DATE, TIME, IP, PATH, ID, NUM, VAR, STATUS, LATENCY, RESOURCE, CODE, ADDRESS.
  static TypeCatalog Default();

  bool HasType(std::string_view name) const;
  const std::set<std::string, std::less<>>& types() const { return types_; }
  const std::set<std::string, std::less<>>& keywords() const { return keywords_; }

  void AddKeyword(const std::string& word) { keywords_.insert(word); }
  void AddKeywordsFrom(const Template& t);

 private:
  std::set<std::string, std::less<>> types_;
  std::set<std::string, std::less<>> keywords_;
};

// Splits on runs of whitespace. Throws kEmptyLog for blank input.
LogRecord TokenizeLog(std::string_view raw, LogId id = LogId{0});

// "[X]" -> placeholder (X must be a catalog type), "<w>" -> keyword w, and any
// bare token -> keyword. Throws kUnknownType or kEmptyTemplate.
Template ParseTemplate(std::string_view text, const TypeCatalog& catalog);
// Same grammar, any placeholder name accepted.
Template ParseTemplate(std::string_view text);

// Positional match: equal length, keywords equal their words, placeholders
// accept anything.
bool TemplateMatches(const LogRecord& log, const Template& t);

std::vector<std::string> SplitWhitespace(std::string_view text);

}  // namespace logtmpl

#endif  // LOGTMPL_TEMPLATE_HPP_
