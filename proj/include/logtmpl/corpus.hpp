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

// Corpus ingestion, the ground-truth annotator, and template accuracy metrics.

#ifndef LOGTMPL_CORPUS_HPP_
#define LOGTMPL_CORPUS_HPP_

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "logtmpl/template.hpp"

namespace logtmpl {

class Corpus {
 public:
  explicit Corpus(TypeCatalog catalog = TypeCatalog::Default()) : catalog_(std::move(catalog)) {}

  // Assigns the next sequential id. A ground-truth template must match the
  // log (kFormatError otherwise).
  LogId Add(std::string_view raw, std::optional<Template> ground_truth = std::nullopt);

  const std::vector<LogRecord>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }
  // Throws kUnknownId.
  const LogRecord& Get(LogId id) const;

  const Template* GroundTruth(LogId id) const;
  bool fully_labeled() const { return !records_.empty() && labels_.size() == records_.size(); }
  // Canonical template string -> logs carrying it.
  const std::map<std::string, std::set<LogId>>& template_index() const { return template_index_; }

  const TypeCatalog& catalog() const { return catalog_; }
  std::vector<LabeledLog> LabeledRecords() const;

 private:
  TypeCatalog catalog_;
  std::vector<LogRecord> records_;
  std::map<LogId, Template> labels_;
  std::map<std::string, std::set<LogId>> template_index_;
};

enum class CorpusFormat { kLogpaiCsv, kJsonl };

// LogPAI CSV: header with Content and EventTemplate columns. Each log word
// overlapping a "<*>" wildcard becomes [VAR]; other words become keywords.
// JSONL: {"log": ..., "template": ...} per line, template optional and in the
// canonical grammar. Throws kFormatError (with line number) or kMissingColumn.
Corpus Ingest(const std::string& path, CorpusFormat format,
              TypeCatalog catalog = TypeCatalog::Default());
Corpus IngestLogpaiCsv(std::istream& in, TypeCatalog catalog = TypeCatalog::Default());
Corpus IngestJsonl(std::istream& in, TypeCatalog catalog = TypeCatalog::Default());

// LogPAI template mapping for one row; nullopt if the template does not
// match the content.
std::optional<Template> TemplateFromLogpai(const LogRecord& log, std::string_view event_template);

void WriteCorpusJsonl(const Corpus& corpus, std::ostream& out);

// Throws kNoGroundTruth (also for unknown ids).
Template OracleAnnotate(LogId id, const Corpus& corpus);

struct EvalReport {
  double mla = 0.0;
  double pta = 0.0;
  double rta = 0.0;
  std::size_t total_logs = 0;
  std::size_t correct_logs = 0;
  std::size_t predicted_templates = 0;
  std::size_t correct_predicted_templates = 0;
  std::size_t ground_truth_templates = 0;
  std::size_t correct_ground_truth_templates = 0;

  std::string ToJson() const;
  std::string ToTable() const;
};

// MLA: exact-template hits over all logs. PTA: predicted templates whose whole
// predicted group carries that ground truth. RTA: ground-truth templates whose
// every log was predicted exactly. Logs without a prediction count as wrong and
// share one synthetic predicted template. Requires ground truth for every log.
EvalReport Evaluate(const std::map<LogId, Template>& predictions, const Corpus& corpus);

// {"id": n, "template": "..."} per line; an empty or absent template means no
// prediction for that log.
std::map<LogId, Template> ReadPredictionsJsonl(std::istream& in);

}  // namespace logtmpl

#endif  // LOGTMPL_CORPUS_HPP_
