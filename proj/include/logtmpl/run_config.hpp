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

// Run configuration, component factories, and artifact writers shared by the
// command-line tool and the HTTP service.

#ifndef LOGTMPL_RUN_CONFIG_HPP_
#define LOGTMPL_RUN_CONFIG_HPP_

#include <memory>
#include <string>

#include "logtmpl/annotation_loop.hpp"
#include "logtmpl/corpus.hpp"
#include "logtmpl/embedding.hpp"
#include "logtmpl/llm_gateway.hpp"

namespace logtmpl {

enum class GatewayKind { kMock, kRemote, kReplay };
enum class AnnotatorKind { kOracle, kInteractive };
enum class EmbeddingKind { kHash, kExternal };

struct RunConfig {
  LoopConfig loop;

  GatewayKind gateway = GatewayKind::kMock;
  RemoteGatewayConfig remote;
  FaultProfile faults;
  std::string record_transcript;  // empty: no recording
  std::string replay_transcript;  // required for kReplay

  EmbeddingKind embedding = EmbeddingKind::kHash;
  std::size_t embedding_dimension = HashEmbeddingProvider::kDefaultDimension;
  std::uint64_t embedding_seed = HashEmbeddingProvider::kDefaultSeed;
  ExternalEmbeddingConfig external_embedding;

  AnnotatorKind annotator = AnnotatorKind::kOracle;
  std::string corpus_path;
  CorpusFormat corpus_format = CorpusFormat::kLogpaiCsv;
  std::string output_dir = "out";
  std::uint64_t seed = 0;
  bool resume = false;

  // Throws kInvalidConfig.
  void Validate() const;
};

CorpusFormat CorpusFormatForPath(const std::string& path);

std::shared_ptr<const EmbeddingProvider> MakeEmbeddingProvider(const RunConfig& config);

// The configured gateway plus, when recording, the recorder wrapping it.
class GatewayStack {
 public:
  GatewayStack(const RunConfig& config, const Corpus& corpus);
  LlmGateway& gateway() { return recorder_ ? *recorder_ : *base_; }

 private:
  std::unique_ptr<LlmGateway> base_;
  std::unique_ptr<TranscriptRecorder> recorder_;
};

// predictions.jsonl: one line per corpus log, ascending id, with the template
// and whether it was annotated, predicted, or failed.
void WritePredictionsJsonl(const RunState& state, const Corpus& corpus, std::ostream& out);
// round,budget,selected,covered_words,mean_confidence,prompt_tokens
void WriteRoundsCsv(const RunState& state, std::ostream& out);

struct ArtifactPaths {
  std::string run_state;
  std::string predictions;
  std::string report;
  std::string rounds;
};

ArtifactPaths ArtifactPathsFor(const std::string& output_dir);

// Writes predictions.jsonl, rounds.csv and, with full ground truth,
// report.json. Returns the report when one was produced.
std::optional<EvalReport> WriteArtifacts(const RunState& state, const Corpus& corpus,
                                         const std::string& output_dir);

}  // namespace logtmpl

#endif  // LOGTMPL_RUN_CONFIG_HPP_
