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

#include "logtmpl/run_config.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "logtmpl/error.hpp"

namespace logtmpl {

using nlohmann::json;

void RunConfig::Validate() const {
  loop.Validate();
  faults.Validate();
  if (gateway == GatewayKind::kRemote && remote.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "remote gateway needs --endpoint");
  }
  if (gateway == GatewayKind::kReplay && replay_transcript.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "replay gateway needs --replay-transcript");
  }
  if (embedding == EmbeddingKind::kExternal && external_embedding.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "external embeddings need --embedding-endpoint");
  }
  if (corpus_path.empty()) throw Error(ErrorCode::kInvalidConfig, "--corpus is required");
}

CorpusFormat CorpusFormatForPath(const std::string& path) {
  const auto ext = std::filesystem::path(path).extension().string();
  return ext == ".jsonl" || ext == ".json" ? CorpusFormat::kJsonl : CorpusFormat::kLogpaiCsv;
}

std::shared_ptr<const EmbeddingProvider> MakeEmbeddingProvider(const RunConfig& config) {
  if (config.embedding == EmbeddingKind::kExternal) {
    return std::make_shared<ExternalEmbeddingProvider>(config.external_embedding);
  }
  return std::make_shared<HashEmbeddingProvider>(config.embedding_dimension,
                                                 config.embedding_seed);
}

GatewayStack::GatewayStack(const RunConfig& config, const Corpus& corpus) {
  switch (config.gateway) {
    case GatewayKind::kMock: {
      FaultProfile faults = config.faults;
      faults.seed = config.seed;
      base_ = std::make_unique<MockGateway>(corpus.LabeledRecords(), faults);
      break;
    }
    case GatewayKind::kRemote:
      base_ = std::make_unique<RemoteGateway>(config.remote);
      break;
    case GatewayKind::kReplay:
      base_ = std::make_unique<TranscriptReplayer>(config.replay_transcript);
      break;
  }
  if (!config.record_transcript.empty()) {
    recorder_ = std::make_unique<TranscriptRecorder>(*base_, config.record_transcript);
  }
}

void WritePredictionsJsonl(const RunState& state, const Corpus& corpus, std::ostream& out) {
  std::map<LogId, const Template*> annotated;
  for (const auto& l : state.labeled) annotated[l.log.id] = &l.label;
  std::map<LogId, double> scores;
  for (const auto& c : state.final_confidence) scores[c.log_id] = c.score;

  for (const auto& r : corpus.records()) {
    json line = {{"id", Index(r.id)}, {"log", r.JoinedWords()}};
    if (auto it = annotated.find(r.id); it != annotated.end()) {
      line["template"] = it->second->Render();
      line["source"] = "annotated";
    } else if (auto p = state.predictions.find(r.id); p != state.predictions.end()) {
      if (p->second.parsed) {
        line["template"] = p->second.predicted.Render();
        line["source"] = "predicted";
      } else {
        line["template"] = "";
        line["source"] = "failed";
      }
      if (auto s = scores.find(r.id); s != scores.end()) line["confidence"] = s->second;
    } else {
      line["template"] = "";
      line["source"] = "missing";
    }
    out << line.dump() << '\n';
  }
}

void WriteRoundsCsv(const RunState& state, std::ostream& out) {
  out << "round,budget,selected,covered_words,mean_confidence,prompt_tokens\n";
  out << std::fixed << std::setprecision(6);
  for (const auto& r : state.rounds) {
    out << r.index << ',' << r.budget << ',' << r.selected.size() << ',' << r.covered_words << ','
        << r.MeanConfidence() << ',' << r.prompt_tokens << '\n';
  }
}

ArtifactPaths ArtifactPathsFor(const std::string& output_dir) {
  const std::filesystem::path dir(output_dir);
  return {(dir / "runstate.json").string(), (dir / "predictions.jsonl").string(),
          (dir / "report.json").string(), (dir / "rounds.csv").string()};
}

std::optional<EvalReport> WriteArtifacts(const RunState& state, const Corpus& corpus,
                                         const std::string& output_dir) {
  std::filesystem::create_directories(output_dir);
  const auto paths = ArtifactPathsFor(output_dir);
  {
    std::ofstream out(paths.predictions, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + paths.predictions);
    WritePredictionsJsonl(state, corpus, out);
  }
  {
    std::ofstream out(paths.rounds, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + paths.rounds);
    WriteRoundsCsv(state, out);
  }
  if (!corpus.fully_labeled()) return std::nullopt;
  const EvalReport report = Evaluate(state.AllTemplates(), corpus);
  std::ofstream out(paths.report, std::ios::trunc);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + paths.report);
  out << report.ToJson() << '\n';
  return report;
}

}  // namespace logtmpl
