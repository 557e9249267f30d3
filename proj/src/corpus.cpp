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

#include "logtmpl/corpus.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "logtmpl/error.hpp"

namespace logtmpl {

using nlohmann::json;

LogId Corpus::Add(std::string_view raw, std::optional<Template> ground_truth) {
  const LogId id{static_cast<std::uint32_t>(records_.size())};
  LogRecord record = TokenizeLog(raw, id);
  if (ground_truth) {
    if (!TemplateMatches(record, *ground_truth)) {
      throw Error(ErrorCode::kFormatError,
                  "template '" + ground_truth->Render() + "' does not match log '" + record.raw + "'");
    }
    catalog_.AddKeywordsFrom(*ground_truth);
    template_index_[ground_truth->Render()].insert(id);
    labels_.emplace(id, std::move(*ground_truth));
  }
  records_.push_back(std::move(record));
  return id;
}

const LogRecord& Corpus::Get(LogId id) const {
  if (Index(id) >= records_.size()) {
    throw Error(ErrorCode::kUnknownId, "no log with id " + std::to_string(Index(id)));
  }
  return records_[Index(id)];
}

const Template* Corpus::GroundTruth(LogId id) const {
  auto it = labels_.find(id);
  return it == labels_.end() ? nullptr : &it->second;
}

std::vector<LabeledLog> Corpus::LabeledRecords() const {
  std::vector<LabeledLog> out;
  for (const auto& [id, t] : labels_) out.push_back({records_[Index(id)], t});
  return out;
}

namespace {

// One RFC 4180 record; quoted fields may span lines. Returns false at EOF.
bool ReadCsvRecord(std::istream& in, std::vector<std::string>& fields, std::size_t& line_no) {
  fields.clear();
  std::string field;
  bool in_quotes = false;
  bool any = false;
  int c;
  while ((c = in.get()) != EOF) {
    any = true;
    const char ch = static_cast<char>(c);
    if (in_quotes) {
      if (ch == '"') {
        if (in.peek() == '"') {
          in.get();
          field += '"';
        } else {
          in_quotes = false;
        }
      } else {
        if (ch == '\n') ++line_no;
        field += ch;
      }
    } else if (ch == '"') {
      in_quotes = true;
    } else if (ch == ',') {
      fields.push_back(std::move(field));
      field.clear();
    } else if (ch == '\n') {
      ++line_no;
      fields.push_back(std::move(field));
      return true;
    } else if (ch != '\r') {
      field += ch;
    }
  }
  if (in_quotes) throw Error(ErrorCode::kFormatError, "line " + std::to_string(line_no) + ": unterminated quote");
  if (!any) return false;
  fields.push_back(std::move(field));
  return true;
}

}  // namespace

std::optional<Template> TemplateFromLogpai(const LogRecord& log, std::string_view event_template) {
  const std::string content = log.JoinedWords();
  std::string pattern;
  for (const auto& piece : SplitWhitespace(event_template)) {
    if (!pattern.empty()) pattern += ' ';
    pattern += piece;
  }
  static constexpr std::string_view kWildcard = "<*>";
  std::vector<std::string> literals;
  for (std::size_t pos = 0;;) {
    const auto next = pattern.find(kWildcard, pos);
    literals.push_back(pattern.substr(pos, next == std::string::npos ? std::string::npos : next - pos));
    if (next == std::string::npos) break;
    pos = next + kWildcard.size();
  }

  // Leftmost matching of each literal; wildcard i spans the gap after literal i.
  std::vector<std::pair<std::size_t, std::size_t>> wildcard_spans;
  if (literals.size() == 1) {
    if (content != literals.front()) return std::nullopt;
  } else {
    const auto& head = literals.front();
    const auto& tail = literals.back();
    if (content.size() < head.size() + tail.size() || content.compare(0, head.size(), head) != 0 ||
        content.compare(content.size() - tail.size(), tail.size(), tail) != 0) {
      return std::nullopt;
    }
    std::size_t cursor = head.size();
    const std::size_t limit = content.size() - tail.size();
    for (std::size_t i = 1; i + 1 < literals.size(); ++i) {
      const auto found = content.find(literals[i], cursor);
      if (found == std::string::npos || found + literals[i].size() > limit) return std::nullopt;
      wildcard_spans.emplace_back(cursor, found);
      cursor = found + literals[i].size();
    }
    wildcard_spans.emplace_back(cursor, limit);
  }

  Template t;
  std::size_t offset = 0;
  for (const auto& w : log.words) {
    const std::size_t begin = offset;
    const std::size_t end = offset + w.size();
    const bool variable = std::any_of(wildcard_spans.begin(), wildcard_spans.end(),
                                      [&](const auto& span) {
                                        return span.first < span.second && span.first < end &&
                                               begin < span.second;
                                      });
    t.tokens.push_back(variable ? TemplateToken::Placeholder("VAR") : TemplateToken::Keyword(w));
    offset = end + 1;
  }
  return t;
}

Corpus IngestLogpaiCsv(std::istream& in, TypeCatalog catalog) {
  if (!catalog.HasType("VAR")) {
    throw Error(ErrorCode::kInvalidConfig, "LogPAI ingestion needs a VAR type in the catalog");
  }
  Corpus corpus(std::move(catalog));
  std::vector<std::string> fields;
  std::size_t line_no = 1;
  if (!ReadCsvRecord(in, fields, line_no)) throw Error(ErrorCode::kFormatError, "empty CSV file");
  if (!fields.empty() && fields.front().rfind("\xEF\xBB\xBF", 0) == 0) fields.front().erase(0, 3);
  auto column = [&](const std::string& name) {
    auto it = std::find(fields.begin(), fields.end(), name);
    if (it == fields.end()) throw Error(ErrorCode::kMissingColumn, "CSV header lacks " + name);
    return static_cast<std::size_t>(it - fields.begin());
  };
  const std::size_t content_col = column("Content");
  const std::size_t template_col = column("EventTemplate");

  std::size_t record_line = line_no;
  while (ReadCsvRecord(in, fields, line_no)) {
    const std::string where = "line " + std::to_string(record_line);
    record_line = line_no;
    if (fields.size() == 1 && fields.front().empty()) continue;
    if (fields.size() <= std::max(content_col, template_col)) {
      throw Error(ErrorCode::kFormatError, where + ": too few columns");
    }
    LogRecord log;
    try {
      log = TokenizeLog(fields[content_col]);
    } catch (const Error&) {
      throw Error(ErrorCode::kFormatError, where + ": empty Content");
    }
    auto t = TemplateFromLogpai(log, fields[template_col]);
    if (!t) {
      throw Error(ErrorCode::kFormatError, where + ": EventTemplate does not match Content");
    }
    corpus.Add(fields[content_col], std::move(*t));
  }
  return corpus;
}

Corpus IngestJsonl(std::istream& in, TypeCatalog catalog) {
  Corpus corpus(std::move(catalog));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = "line " + std::to_string(line_no);
    try {
      const auto j = json::parse(line);
      const auto raw = j.at("log").get<std::string>();
      std::optional<Template> t;
      if (j.contains("template") && !j.at("template").is_null()) {
        t = ParseTemplate(j.at("template").get<std::string>(), corpus.catalog());
      }
      corpus.Add(raw, std::move(t));
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatError, where + ": " + e.what());
    } catch (const Error& e) {
      throw Error(ErrorCode::kFormatError, where + ": " + e.what());
    }
  }
  return corpus;
}

Corpus Ingest(const std::string& path, CorpusFormat format, TypeCatalog catalog) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  return format == CorpusFormat::kLogpaiCsv ? IngestLogpaiCsv(in, std::move(catalog))
                                            : IngestJsonl(in, std::move(catalog));
}

void WriteCorpusJsonl(const Corpus& corpus, std::ostream& out) {
  for (const auto& r : corpus.records()) {
    json j = {{"log", r.JoinedWords()}};
    if (const auto* t = corpus.GroundTruth(r.id)) j["template"] = t->Render();
    out << j.dump() << '\n';
  }
}

Template OracleAnnotate(LogId id, const Corpus& corpus) {
  const auto* t = Index(id) < corpus.size() ? corpus.GroundTruth(id) : nullptr;
  if (!t) throw Error(ErrorCode::kNoGroundTruth, "no ground truth for log " + std::to_string(Index(id)));
  return *t;
}

EvalReport Evaluate(const std::map<LogId, Template>& predictions, const Corpus& corpus) {
  EvalReport report;
  report.total_logs = corpus.size();
  if (corpus.size() == 0) return report;

  // Predicted groups keyed by canonical string; missing predictions share "".
  std::map<std::string, std::vector<LogId>> predicted_groups;
  std::map<std::string, bool> truth_all_correct;
  for (const auto& r : corpus.records()) {
    const Template* truth = corpus.GroundTruth(r.id);
    if (!truth) throw Error(ErrorCode::kNoGroundTruth, "evaluation needs ground truth for every log");
    auto it = predictions.find(r.id);
    const bool has_prediction = it != predictions.end() && !it->second.empty();
    const bool correct = has_prediction && it->second == *truth;
    if (correct) ++report.correct_logs;
    predicted_groups[has_prediction ? it->second.Render() : std::string()].push_back(r.id);
    auto [slot, inserted] = truth_all_correct.try_emplace(truth->Render(), true);
    slot->second = slot->second && correct;
  }

  report.predicted_templates = predicted_groups.size();
  for (const auto& [rendered, ids] : predicted_groups) {
    if (rendered.empty()) continue;
    const bool all_match = std::all_of(ids.begin(), ids.end(), [&](LogId id) {
      return corpus.GroundTruth(id)->Render() == rendered;
    });
    if (all_match) ++report.correct_predicted_templates;
  }
  report.ground_truth_templates = truth_all_correct.size();
  for (const auto& [rendered, ok] : truth_all_correct) report.correct_ground_truth_templates += ok;

  report.mla = static_cast<double>(report.correct_logs) / static_cast<double>(report.total_logs);
  report.pta = static_cast<double>(report.correct_predicted_templates) /
               static_cast<double>(report.predicted_templates);
  report.rta = static_cast<double>(report.correct_ground_truth_templates) /
               static_cast<double>(report.ground_truth_templates);
  return report;
}

std::string EvalReport::ToJson() const {
  json j = {{"mla", mla},
            {"pta", pta},
            {"rta", rta},
            {"total_logs", total_logs},
            {"correct_logs", correct_logs},
            {"predicted_templates", predicted_templates},
            {"correct_predicted_templates", correct_predicted_templates},
            {"ground_truth_templates", ground_truth_templates},
            {"correct_ground_truth_templates", correct_ground_truth_templates}};
  return j.dump(2);
}

std::string EvalReport::ToTable() const {
  std::ostringstream out;
  out << std::fixed << std::setprecision(4);
  out << std::left << std::setw(8) << "metric" << std::right << std::setw(10) << "value"
      << std::setw(10) << "correct" << std::setw(10) << "total" << '\n';
  auto row = [&](const char* name, double v, std::size_t ok, std::size_t all) {
    out << std::left << std::setw(8) << name << std::right << std::setw(10) << v << std::setw(10)
        << ok << std::setw(10) << all << '\n';
  };
  row("MLA", mla, correct_logs, total_logs);
  row("PTA", pta, correct_predicted_templates, predicted_templates);
  row("RTA", rta, correct_ground_truth_templates, ground_truth_templates);
  return out.str();
}

std::map<LogId, Template> ReadPredictionsJsonl(std::istream& in) {
  std::map<LogId, Template> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const auto j = json::parse(line);
      const LogId id{j.at("id").get<std::uint32_t>()};
      if (!j.contains("template") || j.at("template").is_null()) continue;
      const auto text = j.at("template").get<std::string>();
      if (SplitWhitespace(text).empty()) continue;
      out[id] = ParseTemplate(text);
    } catch (const json::exception& e) {
      throw Error(ErrorCode::kFormatError, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace logtmpl
