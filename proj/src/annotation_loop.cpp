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

#include "logtmpl/annotation_loop.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "logtmpl/error.hpp"

namespace logtmpl {

using nlohmann::json;

std::size_t LoopConfig::startup_b0() const { return b0 ? b0 : StartupBudgets(budget).first; }
std::size_t LoopConfig::startup_b1() const { return b1 ? b1 : StartupBudgets(budget).second; }

void LoopConfig::Validate() const {
  auto unit = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!unit(lambda)) throw Error(ErrorCode::kInvalidConfig, "lambda must lie in [0, 1]");
  if (!unit(a)) throw Error(ErrorCode::kInvalidConfig, "a must lie in [0, 1]");
  ValidateDelta(delta);
  if (tau < -1.0 || tau > 1.0) throw Error(ErrorCode::kInvalidConfig, "tau must lie in [-1, 1]");
  if (budget < startup_b0() + startup_b1()) {
    throw Error(ErrorCode::kInvalidConfig, "budget must cover the two startup rounds (" +
                                               std::to_string(startup_b0()) + " + " +
                                               std::to_string(startup_b1()) + ")");
  }
  if (demo_mode == DemoMode::kTopK && k_c == 0) {
    throw Error(ErrorCode::kInvalidConfig, "k_c must be >= 1");
  }
}

std::vector<Template> OracleAnnotator::Annotate(int, std::span<const PendingItem> items) {
  std::vector<Template> out;
  out.reserve(items.size());
  for (const auto& item : items) {
    try {
      out.push_back(OracleAnnotate(item.id, corpus_));
    } catch (const Error& e) {
      throw Error(ErrorCode::kAnnotatorUnavailable, e.what());
    }
  }
  return out;
}

double RoundState::MeanConfidence() const {
  if (confidence.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& c : confidence) sum += c.score;
  return sum / static_cast<double>(confidence.size());
}

std::size_t RoundState::CountConfidenceAbove(double threshold) const {
  return static_cast<std::size_t>(std::count_if(
      confidence.begin(), confidence.end(), [&](const auto& c) { return c.score > threshold; }));
}

std::map<LogId, Template> RunState::AllTemplates() const {
  std::map<LogId, Template> out;
  for (const auto& l : labeled) out[l.log.id] = l.label;
  for (const auto& [id, p] : predictions) {
    if (p.parsed && !out.contains(id)) out[id] = p.predicted;
  }
  return out;
}

namespace {

json ConfigToJson(const LoopConfig& c) {
  return {{"budget", c.budget},
          {"lambda", c.lambda},
          {"delta", c.delta},
          {"a", c.a},
          {"tau", c.tau},
          {"inverted_word_cost", c.inverted_word_cost},
          {"b0", c.startup_b0()},
          {"b1", c.startup_b1()},
          {"demo_mode", c.demo_mode == DemoMode::kAdaptive ? "adaptive" : "topk"},
          {"k_c", c.k_c},
          {"topk_metric", c.topk_metric == DemoMetric::kSed ? "sed" : "cosine"},
          {"concurrency", c.concurrency}};
}

LoopConfig ConfigFromJson(const json& j) {
  LoopConfig c;
  c.budget = j.at("budget").get<std::size_t>();
  c.lambda = j.at("lambda").get<double>();
  c.delta = j.at("delta").get<double>();
  c.a = j.at("a").get<double>();
  c.tau = j.at("tau").get<double>();
  c.inverted_word_cost = j.value("inverted_word_cost", false);
  c.b0 = j.at("b0").get<std::size_t>();
  c.b1 = j.at("b1").get<std::size_t>();
  c.demo_mode = j.value("demo_mode", "adaptive") == "topk" ? DemoMode::kTopK : DemoMode::kAdaptive;
  c.k_c = j.value("k_c", std::size_t{5});
  c.topk_metric = j.value("topk_metric", "sed") == "cosine" ? DemoMetric::kCosine : DemoMetric::kSed;
  c.concurrency = j.value("concurrency", std::size_t{4});
  return c;
}

std::vector<std::uint32_t> Ids(const std::vector<LogId>& ids) {
  std::vector<std::uint32_t> out;
  out.reserve(ids.size());
  for (LogId id : ids) out.push_back(Index(id));
  return out;
}

}  // namespace

std::string RunStateToJson(const RunState& state) {
  json labeled = json::array();
  for (const auto& l : state.labeled) {
    labeled.push_back({{"id", Index(l.log.id)}, {"template", l.label.Render()}});
  }
  json rounds = json::array();
  for (const auto& r : state.rounds) {
    json confidence = json::array();
    for (const auto& c : r.confidence) {
      confidence.push_back({{"id", Index(c.log_id)},
                            {"score", c.score},
                            {"avg_prob", c.avg_prob},
                            {"inconsistent", c.inconsistent}});
    }
    json trace = json::array();
    for (const auto& s : r.trace) {
      trace.push_back({{"id", Index(s.pick)}, {"gain", s.gain}, {"value", s.value_after}});
    }
    rounds.push_back({{"index", r.index},
                      {"budget", r.budget},
                      {"selected", Ids(r.selected)},
                      {"covered_words", r.covered_words},
                      {"prompt_tokens", r.prompt_tokens},
                      {"confidence", std::move(confidence)},
                      {"trace", std::move(trace)}});
  }
  json j = {{"version", RunState::kSchemaVersion},
            {"config", ConfigToJson(state.config)},
            {"labeled", std::move(labeled)},
            {"unlabeled", Ids(state.unlabeled)},
            {"rounds", std::move(rounds)},
            {"budget_remaining", state.budget_remaining},
            {"total_prompt_tokens", state.total_prompt_tokens},
            {"finished", state.finished}};
  return j.dump(2);
}

RunState RunStateFromJson(const std::string& text, const Corpus& corpus) {
  try {
    const auto j = json::parse(text);
    if (j.at("version").get<int>() != RunState::kSchemaVersion) {
      throw Error(ErrorCode::kFormatError, "unsupported run state version");
    }
    RunState state;
    state.config = ConfigFromJson(j.at("config"));
    for (const auto& l : j.at("labeled")) {
      const LogId id{l.at("id").get<std::uint32_t>()};
      state.labeled.push_back({corpus.Get(id), ParseTemplate(l.at("template").get<std::string>())});
    }
    for (auto id : j.at("unlabeled").get<std::vector<std::uint32_t>>()) {
      state.unlabeled.push_back(LogId{id});
    }
    for (const auto& r : j.at("rounds")) {
      RoundState round;
      round.index = r.at("index").get<int>();
      round.budget = r.at("budget").get<std::size_t>();
      for (auto id : r.at("selected").get<std::vector<std::uint32_t>>()) {
        round.selected.push_back(LogId{id});
      }
      round.covered_words = r.at("covered_words").get<std::size_t>();
      round.prompt_tokens = r.value("prompt_tokens", std::size_t{0});
      for (const auto& c : r.value("confidence", json::array())) {
        ConfidenceReport report;
        report.log_id = LogId{c.at("id").get<std::uint32_t>()};
        report.score = c.at("score").get<double>();
        report.avg_prob = c.at("avg_prob").get<double>();
        report.inconsistent = c.at("inconsistent").get<int>();
        report.weight_a = state.config.a;
        round.confidence.push_back(report);
      }
      for (const auto& s : r.value("trace", json::array())) {
        round.trace.push_back({LogId{s.at("id").get<std::uint32_t>()}, s.at("gain").get<double>(),
                               s.at("value").get<double>()});
      }
      state.rounds.push_back(std::move(round));
    }
    state.budget_remaining = j.at("budget_remaining").get<std::size_t>();
    state.total_prompt_tokens = j.value("total_prompt_tokens", std::size_t{0});
    state.finished = j.value("finished", false);
    return state;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormatError, std::string("run state: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kFormatError) throw;
    throw Error(ErrorCode::kFormatError, std::string("run state: ") + e.what());
  }
}

void SaveRunStateAtomic(const RunState& state, const std::string& path) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path temp = target.string() + ".tmp";
  {
    std::ofstream out(temp, std::ios::trunc);
    if (!out) throw Error(ErrorCode::kIoError, "cannot write " + temp.string());
    out << RunStateToJson(state) << '\n';
    if (!out.flush()) throw Error(ErrorCode::kIoError, "cannot write " + temp.string());
  }
  fs::rename(temp, target);
}

RunState LoadRunState(const std::string& path, const Corpus& corpus) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return RunStateFromJson(buffer.str(), corpus);
}

std::vector<Prediction> PredictAll(std::span<const LogRecord> targets,
                                   std::span<const LabeledLog> labeled, int round,
                                   const LoopConfig& config, const TypeCatalog& catalog,
                                   const WordEmbeddings& embeddings, LlmGateway& gateway,
                                   std::size_t* prompt_tokens) {
  std::vector<std::string> vocabulary;
  for (const auto& t : targets) vocabulary.insert(vocabulary.end(), t.words.begin(), t.words.end());
  for (const auto& l : labeled) {
    vocabulary.insert(vocabulary.end(), l.log.words.begin(), l.log.words.end());
  }
  embeddings.Prefetch(vocabulary);

  const SedOptions sed_options{config.tau, config.inverted_word_cost};
  std::vector<Prediction> out(targets.size());
  std::vector<std::size_t> tokens(targets.size(), 0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < targets.size(); i = next++) {
      const auto& target = targets[i];
      const DemoSet demos =
          config.demo_mode == DemoMode::kAdaptive
              ? SelectDemos(target, labeled, embeddings, config.tau)
              : SelectDemosTopK(target, labeled, config.k_c, config.topk_metric, embeddings,
                                sed_options);
      InferenceRequest request{target.id, round, BuildPrompt(target, demos, catalog)};
      out[i] = Infer(request, gateway, catalog, &tokens[i]);
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(config.concurrency, 1, targets.size() ? targets.size() : 1);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (prompt_tokens) {
    *prompt_tokens = 0;
    for (auto t : tokens) *prompt_tokens += t;
  }
  return out;
}

std::size_t NextRoundBudget(const RunState& state) {
  const std::size_t r = state.rounds.size();
  if (r == 0) return std::min(state.config.startup_b0(), state.budget_remaining);
  if (r == 1) return std::min(state.config.startup_b1(), state.budget_remaining);
  const auto& prev = state.rounds[r - 1];
  const auto& prev2 = state.rounds[r - 2];
  return AdaptiveBudget(prev.budget, prev.covered_words, prev2.covered_words,
                        state.budget_remaining);
}

namespace {

class LoopRunner {
 public:
  LoopRunner(const Corpus& corpus, Annotator& annotator, LlmGateway& gateway,
             const WordEmbeddings& embeddings, const LoopHooks& hooks, RunState state)
      : corpus_(corpus),
        annotator_(annotator),
        gateway_(gateway),
        embeddings_(embeddings),
        hooks_(hooks),
        state_(std::move(state)),
        catalog_(corpus.catalog()),
        engine_(embeddings, SedOptions{state_.config.tau, state_.config.inverted_word_cost}) {
    for (const auto& l : state_.labeled) {
      engine_.AddLabeled(l.log);
      catalog_.AddKeywordsFrom(l.label);
    }
  }

  RunState Run(bool fresh) {
    if (fresh) InitialRound();
    int empty_selections = 0;
    for (int r = static_cast<int>(state_.rounds.size());; ++r) {
      const auto unlabeled = UnlabeledRecords();
      std::size_t tokens = 0;
      auto predictions = PredictAll(unlabeled, state_.labeled, r, state_.config, catalog_,
                                    embeddings_, gateway_, &tokens);
      state_.total_prompt_tokens += tokens;

      std::vector<ConfidenceReport> reports;
      ConfidenceMap conf;
      for (std::size_t i = 0; i < unlabeled.size(); ++i) {
        reports.push_back(ConfidenceScore(unlabeled[i], predictions[i], state_.config.a));
        conf[unlabeled[i].id] = reports.back().score;
      }

      if (hooks_.on_predictions) hooks_.on_predictions(r, predictions, reports);

      const std::size_t budget =
          unlabeled.empty() || state_.budget_remaining == 0 ? 0 : NextRoundBudget(state_);
      GreedyTrace trace;
      if (budget > 0) {
        const SelectionConfig selection{state_.config.lambda, state_.config.delta};
        trace = SelectRound(unlabeled, conf, budget, selection, engine_);
      }
      // Degenerate pools may yield nothing; retry with fresh predictions
      // before giving up.
      if (trace.steps.empty() && budget > 0 && ++empty_selections < 3) {
        --r;
        continue;
      }
      if (trace.steps.empty()) {
        Finish(unlabeled, std::move(predictions), std::move(reports));
        break;
      }
      empty_selections = 0;

      std::map<LogId, const Prediction*> by_id;
      for (const auto& p : predictions) by_id[p.log_id] = &p;
      RoundState round;
      round.index = r;
      round.budget = budget;
      round.selected = trace.Selected();
      round.trace = std::move(trace.steps);
      round.confidence = std::move(reports);
      round.prompt_tokens = tokens;
      AnnotateAndRecord(std::move(round), by_id);
    }
    return std::move(state_);
  }

 private:
  void Log(const std::string& message) const {
    if (hooks_.log) hooks_.log(message);
  }

  std::vector<LogRecord> UnlabeledRecords() const {
    std::vector<LogRecord> out;
    out.reserve(state_.unlabeled.size());
    for (LogId id : state_.unlabeled) out.push_back(corpus_.Get(id));
    return out;
  }

  void InitialRound() {
    const std::size_t b0 = NextRoundBudget(state_);
    RoundState round;
    round.index = 0;
    round.budget = b0;
    round.selected = DiversityInit(corpus_.records(), b0, embeddings_);
    AnnotateAndRecord(std::move(round), {});
  }

  void AnnotateAndRecord(RoundState round, const std::map<LogId, const Prediction*>& guesses) {
    std::vector<PendingItem> items;
    for (LogId id : round.selected) {
      PendingItem item{id, corpus_.Get(id).raw, std::nullopt};
      if (auto it = guesses.find(id); it != guesses.end() && it->second->parsed) {
        item.guess = it->second->predicted;
      }
      items.push_back(std::move(item));
    }
    // Annotator failures propagate before any state changes.
    auto templates = annotator_.Annotate(round.index, items);
    if (templates.size() != items.size()) {
      throw Error(ErrorCode::kAnnotatorUnavailable, "annotator returned a short batch");
    }

    std::set<LogId> chosen(round.selected.begin(), round.selected.end());
    for (std::size_t i = 0; i < items.size(); ++i) {
      const auto& log = corpus_.Get(items[i].id);
      engine_.AddLabeled(log);
      catalog_.AddKeywordsFrom(templates[i]);
      state_.labeled.push_back({log, std::move(templates[i])});
    }
    std::erase_if(state_.unlabeled, [&](LogId id) { return chosen.contains(id); });
    state_.budget_remaining -= std::min(state_.budget_remaining, round.selected.size());
    round.covered_words = engine_.labeled_index().word_count();
    Log("round " + std::to_string(round.index) + ": budget " + std::to_string(round.budget) +
        ", annotated " + std::to_string(round.selected.size()) + ", identified words " +
        std::to_string(round.covered_words));
    state_.rounds.push_back(std::move(round));
    if (hooks_.on_round) hooks_.on_round(state_);
  }

  void Finish(const std::vector<LogRecord>& unlabeled, std::vector<Prediction> predictions,
              std::vector<ConfidenceReport> reports) {
    state_.predictions.clear();
    for (std::size_t i = 0; i < unlabeled.size(); ++i) {
      state_.predictions[unlabeled[i].id] = std::move(predictions[i]);
    }
    state_.final_confidence = std::move(reports);
    state_.finished = true;
    if (hooks_.on_round) hooks_.on_round(state_);
  }

  const Corpus& corpus_;
  Annotator& annotator_;
  LlmGateway& gateway_;
  const WordEmbeddings& embeddings_;
  const LoopHooks& hooks_;
  RunState state_;
  TypeCatalog catalog_;
  SedEngine engine_;
};

}  // namespace

RunState RunAnnotationLoop(const Corpus& corpus, Annotator& annotator, LlmGateway& gateway,
                           const WordEmbeddings& embeddings, const LoopConfig& config,
                           const LoopHooks& hooks, std::optional<RunState> resume) {
  config.Validate();
  if (corpus.size() == 0) throw Error(ErrorCode::kInvalidConfig, "corpus is empty");
  const bool fresh = !resume.has_value();
  RunState state;
  if (resume) {
    state = std::move(*resume);
    state.config.concurrency = config.concurrency;
    state.finished = false;
  } else {
    state.config = config;
    state.budget_remaining = config.budget;
    for (const auto& r : corpus.records()) state.unlabeled.push_back(r.id);
  }
  LoopRunner runner(corpus, annotator, gateway, embeddings, hooks, std::move(state));
  return runner.Run(fresh);
}

}  // namespace logtmpl
