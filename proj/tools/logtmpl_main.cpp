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

// logtmpl: run, evaluate, inspect, and serve template annotation runs.

#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "logtmpl/annotation_loop.hpp"
#include "logtmpl/corpus.hpp"
#include "logtmpl/error.hpp"
#include "logtmpl/run_config.hpp"
#include "logtmpl/service.hpp"

namespace {

using logtmpl::Error;
using logtmpl::ErrorCode;
using logtmpl::LogId;
using nlohmann::json;

struct CorpusOptions {
  std::string format = "auto";
};

// Shared by every subcommand's --config option.
std::string config_file;

// Fills options of the parsed subcommand from a TOML file unless the flag was given.
void ApplyConfigFile(CLI::App* sub) {
  if (config_file.empty()) return;
  if (!std::filesystem::is_regular_file(config_file)) {
    throw Error(ErrorCode::kIoError, "cannot read " + config_file);
  }
  for (const auto& item : CLI::ConfigTOML().from_file(config_file)) {
    if (item.name == "++" || item.name == "--") continue;  // section markers
    CLI::Option* option = sub->get_option_no_throw("--" + item.name);
    if (option == nullptr || item.name == "config") {
      throw Error(ErrorCode::kInvalidConfig, "unknown config key '" + item.name + "'");
    }
    if (option->count() > 0) continue;
    for (const auto& value : item.inputs) option->add_result(value);
    option->run_callback();
  }
}

CLI::App* SelectedLeaf(CLI::App& app) {
  CLI::App* leaf = &app;
  while (!leaf->get_subcommands().empty()) leaf = leaf->get_subcommands().front();
  return leaf;
}

void AddCorpusOptions(CLI::App* app, logtmpl::RunConfig& config, CorpusOptions& corpus) {
  app->add_option("--corpus", config.corpus_path, "LogPAI CSV or JSONL corpus (required)");
  app->add_option("--format", corpus.format, "Corpus format")
      ->check(CLI::IsMember({"auto", "logpai", "jsonl"}));
}

void AddRunOptions(CLI::App* app, logtmpl::RunConfig& config) {
  auto& loop = config.loop;
  app->add_option("--budget", loop.budget, "Total annotation budget");
  app->add_option("--lambda", loop.lambda, "Coverage/confidence trade-off")
      ->check(CLI::Range(0.0, 1.0));
  app->add_option("--delta", loop.delta, "Representative-set radius");
  app->add_option("--a", loop.a, "Confidence weight on probability");
  app->add_option("--tau", loop.tau, "Word-similarity cosine threshold");
  app->add_flag("--inverted-word-cost", loop.inverted_word_cost,
                "Charge 1 for similar words in the edit distance");
  app->add_option("--b0", loop.b0, "Round-0 budget (0: derived from --budget)");
  app->add_option("--b1", loop.b1, "Round-1 budget (0: derived from --budget)");
  const std::map<std::string, logtmpl::DemoMode> modes{{"adaptive", logtmpl::DemoMode::kAdaptive},
                                                       {"topk", logtmpl::DemoMode::kTopK}};
  app->add_option("--demo-mode", loop.demo_mode, "Demonstration selection")
      ->transform(CLI::CheckedTransformer(modes, CLI::ignore_case));
  app->add_option("--k-c", loop.k_c, "Demonstrations in top-k mode");
  const std::map<std::string, logtmpl::DemoMetric> metrics{{"sed", logtmpl::DemoMetric::kSed},
                                                           {"cosine", logtmpl::DemoMetric::kCosine}};
  app->add_option("--topk-metric", loop.topk_metric, "Ranking for top-k demonstrations")
      ->transform(CLI::CheckedTransformer(metrics, CLI::ignore_case));
  app->add_option("--concurrency", loop.concurrency, "Parallel inference calls");

  const std::map<std::string, logtmpl::GatewayKind> gateways{
      {"mock", logtmpl::GatewayKind::kMock},
      {"remote", logtmpl::GatewayKind::kRemote},
      {"replay", logtmpl::GatewayKind::kReplay}};
  app->add_option("--gateway", config.gateway, "LLM backend")
      ->transform(CLI::CheckedTransformer(gateways, CLI::ignore_case));
  app->add_option("--endpoint", config.remote.endpoint, "Chat-completions base URL");
  app->add_option("--model", config.remote.model, "Remote model name");
  app->add_option("--api-key-env", config.remote.api_key_env, "Env var holding the API key");
  app->add_option("--generation-error-rate", config.faults.generation_error_rate,
                  "Mock: fraction of truncated answers");
  app->add_option("--word-error-rate", config.faults.word_error_rate,
                  "Mock: fraction of answers with a missed variable");
  app->add_option("--unseen-keyword-prob-penalty", config.faults.unseen_keyword_prob_penalty,
                  "Mock: probability of keywords absent from the demonstrations");
  app->add_option("--seed", config.seed, "Seed for mock faults");
  app->add_option("--record-transcript", config.record_transcript, "Append exchanges to JSONL");
  app->add_option("--replay-transcript", config.replay_transcript, "Recorded JSONL to replay");

  const std::map<std::string, logtmpl::EmbeddingKind> embeddings{
      {"hash", logtmpl::EmbeddingKind::kHash}, {"external", logtmpl::EmbeddingKind::kExternal}};
  app->add_option("--embedding", config.embedding, "Word embedding provider")
      ->transform(CLI::CheckedTransformer(embeddings, CLI::ignore_case));
  app->add_option("--embedding-dimension", config.embedding_dimension, "Hash embedding size");
  app->add_option("--embedding-seed", config.embedding_seed, "Hash embedding seed");
  app->add_option("--embedding-endpoint", config.external_embedding.endpoint,
                  "Embeddings base URL");
  app->add_option("--embedding-model", config.external_embedding.model,
                  "External embedding model");

  app->add_option("--out", config.output_dir, "Artifact directory");
  app->add_flag("--resume", config.resume, "Continue from <out>/runstate.json");
  app->add_option("--config", config_file, "TOML key = value file; flags override it");
}

logtmpl::Corpus LoadCorpus(const logtmpl::RunConfig& config, const CorpusOptions& options) {
  if (config.corpus_path.empty()) throw Error(ErrorCode::kInvalidConfig, "--corpus is required");
  logtmpl::CorpusFormat format = logtmpl::CorpusFormatForPath(config.corpus_path);
  if (options.format == "logpai") format = logtmpl::CorpusFormat::kLogpaiCsv;
  if (options.format == "jsonl") format = logtmpl::CorpusFormat::kJsonl;
  return logtmpl::Ingest(config.corpus_path, format);
}

LogId ParseId(std::uint32_t id, const logtmpl::Corpus& corpus) {
  const LogId log{id};
  corpus.Get(log);  // throws kUnknownId
  return log;
}

std::vector<logtmpl::LabeledLog> LabeledFrom(const std::string& runstate,
                                             const logtmpl::Corpus& corpus) {
  if (runstate.empty()) return corpus.LabeledRecords();
  return logtmpl::LoadRunState(runstate, corpus).labeled;
}

int CmdRun(logtmpl::RunConfig& config, const CorpusOptions& corpus_options, bool quiet) {
  if (config.annotator == logtmpl::AnnotatorKind::kInteractive) {
    throw Error(ErrorCode::kInvalidConfig, "the interactive annotator needs `logtmpl serve`");
  }
  config.Validate();
  const auto corpus = LoadCorpus(config, corpus_options);
  logtmpl::WordEmbeddings embeddings(logtmpl::MakeEmbeddingProvider(config));
  logtmpl::GatewayStack gateways(config, corpus);
  logtmpl::OracleAnnotator annotator(corpus);

  const auto paths = logtmpl::ArtifactPathsFor(config.output_dir);
  std::filesystem::create_directories(config.output_dir);
  std::optional<logtmpl::RunState> resume;
  if (config.resume && std::filesystem::exists(paths.run_state)) {
    resume = logtmpl::LoadRunState(paths.run_state, corpus);
  }

  logtmpl::LoopHooks hooks;
  hooks.on_round = [&](const logtmpl::RunState& state) {
    logtmpl::SaveRunStateAtomic(state, paths.run_state);
  };
  if (!quiet) hooks.log = [](const std::string& m) { std::cerr << m << '\n'; };

  const auto state = logtmpl::RunAnnotationLoop(corpus, annotator, gateways.gateway(), embeddings,
                                                config.loop, hooks, std::move(resume));
  const auto report = logtmpl::WriteArtifacts(state, corpus, config.output_dir);
  std::cout << "rounds: " << state.rounds.size() << ", annotated: " << state.labeled.size()
            << ", prompt tokens: " << state.total_prompt_tokens << '\n';
  if (report) std::cout << report->ToTable();
  std::cout << "artifacts in " << config.output_dir << '\n';
  return 0;
}

int CmdEval(const std::string& predictions_path, logtmpl::RunConfig& config,
            const CorpusOptions& corpus_options, const std::string& out) {
  const auto corpus = LoadCorpus(config, corpus_options);
  if (!corpus.fully_labeled()) {
    throw Error(ErrorCode::kNoGroundTruth, "corpus lacks ground truth for some logs");
  }
  std::ifstream in(predictions_path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot read " + predictions_path);
  const auto report = logtmpl::Evaluate(logtmpl::ReadPredictionsJsonl(in), corpus);
  std::cout << report.ToTable();
  if (!out.empty()) {
    std::ofstream file(out, std::ios::trunc);
    if (!file) throw Error(ErrorCode::kIoError, "cannot write " + out);
    file << report.ToJson() << '\n';
  }
  return 0;
}

json WordsJson(const std::vector<std::string>& words) { return json(words); }

int CmdInspectSed(logtmpl::RunConfig& config, const CorpusOptions& corpus_options,
                  std::uint32_t a, std::uint32_t b, const std::string& runstate) {
  const auto corpus = LoadCorpus(config, corpus_options);
  logtmpl::WordEmbeddings embeddings(logtmpl::MakeEmbeddingProvider(config));
  const auto& la = corpus.Get(ParseId(a, corpus));
  const auto& lb = corpus.Get(ParseId(b, corpus));
  std::vector<logtmpl::LogRecord> labeled;
  if (!runstate.empty()) {
    for (const auto& l : logtmpl::LoadRunState(runstate, corpus).labeled) labeled.push_back(l.log);
  }
  const logtmpl::SedOptions options{config.loop.tau, config.loop.inverted_word_cost};
  const auto ra = logtmpl::Residual(la, labeled);
  const auto rb = logtmpl::Residual(lb, labeled);
  json out = {{"a", a},
              {"b", b},
              {"distance", logtmpl::Sed(la, lb, labeled, embeddings, options)},
              {"residual_a", WordsJson(ra.residual_words)},
              {"residual_b", WordsJson(rb.residual_words)},
              {"labeled_logs", labeled.size()}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int CmdInspectDemos(logtmpl::RunConfig& config, const CorpusOptions& corpus_options,
                    std::uint32_t id, const std::string& runstate) {
  const auto corpus = LoadCorpus(config, corpus_options);
  logtmpl::WordEmbeddings embeddings(logtmpl::MakeEmbeddingProvider(config));
  const auto& target = corpus.Get(ParseId(id, corpus));
  auto labeled = LabeledFrom(runstate, corpus);
  std::erase_if(labeled, [&](const auto& l) { return l.log.id == target.id; });
  const logtmpl::SedOptions options{config.loop.tau, config.loop.inverted_word_cost};
  const auto demos =
      config.loop.demo_mode == logtmpl::DemoMode::kTopK
          ? logtmpl::SelectDemosTopK(target, labeled, config.loop.k_c, config.loop.topk_metric,
                                     embeddings, options)
          : logtmpl::SelectDemos(target, labeled, embeddings, config.loop.tau);
  json list = json::array();
  for (const auto& d : demos.demos) {
    list.push_back({{"id", logtmpl::Index(d.log.id)},
                    {"log", d.log.JoinedWords()},
                    {"template", d.label.Render()}});
  }
  json out = {{"target", id},
              {"log", target.JoinedWords()},
              {"demos", list},
              {"covered_words", demos.covered_words},
              {"uncovered_words", demos.uncovered},
              {"cap_reached", demos.cap_reached}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int CmdInspectSelect(logtmpl::RunConfig& config, const CorpusOptions& corpus_options,
                     const std::string& runstate) {
  const auto corpus = LoadCorpus(config, corpus_options);
  logtmpl::WordEmbeddings embeddings(logtmpl::MakeEmbeddingProvider(config));
  if (runstate.empty()) {
    const std::size_t b0 = config.loop.startup_b0();
    json ids = json::array();
    for (LogId id : logtmpl::DiversityInit(corpus.records(), b0, embeddings)) {
      ids.push_back(logtmpl::Index(id));
    }
    std::cout << json{{"round", 0}, {"budget", b0}, {"diversity_init", ids}}.dump(2) << '\n';
    return 0;
  }
  const auto state = logtmpl::LoadRunState(runstate, corpus);
  std::vector<logtmpl::LogRecord> unlabeled;
  for (LogId id : state.unlabeled) unlabeled.push_back(corpus.Get(id));
  logtmpl::TypeCatalog catalog = corpus.catalog();
  const logtmpl::SedOptions options{state.config.tau, state.config.inverted_word_cost};
  logtmpl::SedEngine engine(embeddings, options);
  for (const auto& l : state.labeled) {
    engine.AddLabeled(l.log);
    catalog.AddKeywordsFrom(l.label);
  }
  logtmpl::GatewayStack gateways(config, corpus);
  const int round = static_cast<int>(state.rounds.size());
  const auto predictions = logtmpl::PredictAll(unlabeled, state.labeled, round, state.config,
                                               catalog, embeddings, gateways.gateway());
  logtmpl::ConfidenceMap conf;
  for (std::size_t i = 0; i < unlabeled.size(); ++i) {
    conf[unlabeled[i].id] = logtmpl::ConfidenceScore(unlabeled[i], predictions[i], state.config.a).score;
  }
  const std::size_t budget = state.budget_remaining == 0 ? 0 : logtmpl::NextRoundBudget(state);
  const auto trace = logtmpl::SelectRound(unlabeled, conf, budget,
                                          {state.config.lambda, state.config.delta}, engine);
  json steps = json::array();
  for (const auto& s : trace.steps) {
    steps.push_back({{"pick", logtmpl::Index(s.pick)},
                     {"gain", s.gain},
                     {"value_after", s.value_after},
                     {"confidence", conf.at(s.pick)}});
  }
  std::cout << json{{"round", round}, {"budget", budget}, {"trace", steps}}.dump(2) << '\n';
  return 0;
}

logtmpl::AnnotationService* g_service = nullptr;

void HandleSignal(int) {
  if (g_service) g_service->RequestStop();
}

int CmdServe(logtmpl::RunConfig& config, const CorpusOptions& corpus_options,
             logtmpl::ServiceOptions options) {
  config.annotator = logtmpl::AnnotatorKind::kInteractive;
  config.Validate();
  const auto corpus = LoadCorpus(config, corpus_options);
  logtmpl::AnnotationService service(corpus, config, std::move(options));
  const int port = service.Start();
  std::cerr << "serving on port " << port << '\n';
  g_service = &service;
  std::signal(SIGINT, HandleSignal);
  std::signal(SIGTERM, HandleSignal);
  service.Wait();
  g_service = nullptr;
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Log template extraction with active annotation"};
  app.require_subcommand(1);

  logtmpl::RunConfig config;
  CorpusOptions corpus_options;

  auto* run = app.add_subcommand("run", "Run the annotation loop with the oracle annotator");
  AddCorpusOptions(run, config, corpus_options);
  AddRunOptions(run, config);
  bool quiet = false;
  run->add_flag("--quiet", quiet, "No per-round log lines");

  auto* eval = app.add_subcommand("eval", "Score a predictions file against ground truth");
  std::string predictions_path;
  std::string eval_out;
  eval->add_option("--predictions", predictions_path, "predictions.jsonl")->required();
  AddCorpusOptions(eval, config, corpus_options);
  eval->add_option("--out", eval_out, "Write the report as JSON");

  auto* inspect = app.add_subcommand("inspect", "Debug views of distance, demos, and selection");
  inspect->require_subcommand(1);
  std::string runstate;
  std::uint32_t id_a = 0;
  std::uint32_t id_b = 0;
  auto* sed = inspect->add_subcommand("sed", "Distance and residuals of two logs");
  AddCorpusOptions(sed, config, corpus_options);
  AddRunOptions(sed, config);
  sed->add_option("first", id_a, "First log id")->required();
  sed->add_option("second", id_b, "Second log id")->required();
  sed->add_option("--runstate", runstate, "Use this run's labeled logs");
  auto* demos = inspect->add_subcommand("demos", "Demonstrations chosen for a log");
  AddCorpusOptions(demos, config, corpus_options);
  AddRunOptions(demos, config);
  demos->add_option("id", id_a, "Target log id")->required();
  demos->add_option("--runstate", runstate, "Labeled pool (default: every ground-truth log)");
  auto* select = inspect->add_subcommand("select", "Next round's greedy trace");
  AddCorpusOptions(select, config, corpus_options);
  AddRunOptions(select, config);
  bool dry_run = true;
  select->add_flag("--dry-run", dry_run, "Do not annotate (always on)");
  select->add_option("--runstate", runstate, "Run to continue (default: round 0)");

  auto* serve = app.add_subcommand("serve", "Serve an interactive annotation run over HTTP");
  AddCorpusOptions(serve, config, corpus_options);
  AddRunOptions(serve, config);
  logtmpl::ServiceOptions service_options;
  serve->add_option("--host", service_options.host, "Bind address");
  serve->add_option("--port", service_options.port, "Port (0: any free port)");
  serve->add_option("--static-dir", service_options.static_dir, "Annotation UI assets");
  serve->add_option("--token", service_options.bearer_token, "Shared bearer token for /api");

  CLI11_PARSE(app, argc, argv);

  try {
    ApplyConfigFile(SelectedLeaf(app));
    if (*run) return CmdRun(config, corpus_options, quiet);
    if (*eval) return CmdEval(predictions_path, config, corpus_options, eval_out);
    if (*sed) return CmdInspectSed(config, corpus_options, id_a, id_b, runstate);
    if (*demos) return CmdInspectDemos(config, corpus_options, id_a, runstate);
    if (*select) return CmdInspectSelect(config, corpus_options, runstate);
    if (*serve) return CmdServe(config, corpus_options, service_options);
  } catch (const Error& e) {
    std::cerr << "error: " << logtmpl::ErrorCodeName(e.code()) << ": " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 1;
}
