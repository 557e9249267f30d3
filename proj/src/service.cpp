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

#include "logtmpl/service.hpp"

#include <chrono>
#include <ctime>
#include <filesystem>

#include <httplib.h>
#include <json.hpp>

#include "logtmpl/error.hpp"

namespace logtmpl {

using nlohmann::json;

namespace {

std::string UtcNow() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json OptionalTemplate(const std::optional<Template>& t) {
  return t ? json(t->Render()) : json(nullptr);
}

void Reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void ReplyError(httplib::Response& res, int status, const std::string& error,
                const std::string& message) {
  Reply(res, status, {{"error", error}, {"message", message}});
}

}  // namespace

// InteractiveAnnotator

std::vector<Template> InteractiveAnnotator::Annotate(int round,
                                                     std::span<const PendingItem> items) {
  std::unique_lock lock(mu_);
  if (closed_) throw Error(ErrorCode::kAnnotatorUnavailable, "annotator closed");
  round_ = round;
  items_.clear();
  for (const auto& item : items) {
    PendingAnnotation p;
    p.round = round;
    p.log_id = item.id;
    p.raw = item.raw;
    p.words = SplitWhitespace(item.raw);
    p.guess = item.guess;
    items_.push_back(std::move(p));
  }
  awaiting_ = true;
  advance_ = false;
  cv_.wait(lock, [&] { return closed_ || advance_; });
  awaiting_ = false;
  if (closed_) throw Error(ErrorCode::kAnnotatorUnavailable, "annotator closed mid-round");
  std::vector<Template> out;
  out.reserve(items_.size());
  for (auto& p : items_) out.push_back(*p.submitted);
  return out;
}

std::size_t InteractiveAnnotator::OutstandingLocked() const {
  return static_cast<std::size_t>(
      std::count_if(items_.begin(), items_.end(), [](const auto& p) { return !p.submitted; }));
}

InteractiveAnnotator::SubmitResult InteractiveAnnotator::Submit(LogId id,
                                                                std::string_view template_text,
                                                                const std::string& submitter) {
  std::lock_guard lock(mu_);
  SubmitResult result;
  auto it = std::find_if(items_.begin(), items_.end(),
                         [&](const auto& p) { return p.log_id == id; });
  if (!awaiting_ || it == items_.end()) {
    result.status = SubmitStatus::kUnknownLog;
    result.message = "log " + std::to_string(Index(id)) + " is not pending";
    result.outstanding = OutstandingLocked();
    return result;
  }
  if (it->submitted) {
    result.status = SubmitStatus::kDuplicate;
    result.message = "log " + std::to_string(Index(id)) + " already annotated";
    result.outstanding = OutstandingLocked();
    return result;
  }
  Template t;
  try {
    t = ParseTemplate(template_text, catalog_);
  } catch (const Error& e) {
    result.status = SubmitStatus::kMalformed;
    result.error = ErrorCodeName(e.code());
    result.message = e.what();
    result.outstanding = OutstandingLocked();
    return result;
  }
  if (t.size() != it->words.size()) {
    result.status = SubmitStatus::kMalformed;
    result.error = "WordCountMismatch";
    result.message = "template has " + std::to_string(t.size()) + " tokens, log has " +
                     std::to_string(it->words.size()) + " words";
    result.outstanding = OutstandingLocked();
    return result;
  }
  it->submitted = std::move(t);
  it->submitter = submitter;
  it->submitted_at = UtcNow();
  result.outstanding = OutstandingLocked();
  return result;
}

InteractiveAnnotator::AdvanceStatus InteractiveAnnotator::Advance(std::size_t* outstanding) {
  std::lock_guard lock(mu_);
  const std::size_t left = OutstandingLocked();
  if (outstanding) *outstanding = left;
  if (!awaiting_) return AdvanceStatus::kNoRound;
  if (left > 0) return AdvanceStatus::kOutstanding;
  advance_ = true;
  cv_.notify_all();
  return AdvanceStatus::kAdvanced;
}

InteractiveAnnotator::Snapshot InteractiveAnnotator::Pending() const {
  std::lock_guard lock(mu_);
  return {awaiting_, round_, items_, OutstandingLocked()};
}

void InteractiveAnnotator::Close() {
  std::lock_guard lock(mu_);
  closed_ = true;
  cv_.notify_all();
}

// AnnotationService

struct AnnotationService::Impl {
  Impl(const Corpus& c, RunConfig cfg, ServiceOptions opts)
      : corpus(c),
        config(std::move(cfg)),
        options(std::move(opts)),
        embeddings(MakeEmbeddingProvider(config)),
        gateways(config, corpus) {}

  const Corpus& corpus;
  RunConfig config;
  ServiceOptions options;
  WordEmbeddings embeddings;
  GatewayStack gateways;
  httplib::Server server;
  std::thread loop_thread;
  std::thread listen_thread;

  mutable std::mutex mu;
  RunState state;  // last snapshot from the loop
  std::map<LogId, Prediction> latest;
  std::map<LogId, double> latest_confidence;
  int latest_round = -1;
  struct MetricPoint {
    int round;
    EvalReport report;
  };
  std::vector<MetricPoint> history;
  bool loop_done = false;
  std::string loop_error;

  std::map<LogId, Template> CurrentTemplatesLocked() const {
    std::map<LogId, Template> out;
    for (const auto& [id, p] : latest) {
      if (p.parsed) out[id] = p.predicted;
    }
    for (const auto& l : state.labeled) out[l.log.id] = l.label;
    return out;
  }
};

AnnotationService::AnnotationService(const Corpus& corpus, RunConfig config,
                                     ServiceOptions options)
    : impl_(std::make_unique<Impl>(corpus, std::move(config), std::move(options))),
      annotator_(corpus.catalog()) {
  Impl& s = *impl_;
  auto& server = s.server;

  if (!s.options.bearer_token.empty()) {
    server.set_pre_routing_handler([&s](const httplib::Request& req, httplib::Response& res) {
      if (req.path.rfind("/api", 0) != 0) return httplib::Server::HandlerResponse::Unhandled;
      if (req.get_header_value("Authorization") == "Bearer " + s.options.bearer_token) {
        return httplib::Server::HandlerResponse::Unhandled;
      }
      ReplyError(res, 401, "Unauthorized", "missing or wrong bearer token");
      return httplib::Server::HandlerResponse::Handled;
    });
  }
  if (!s.options.static_dir.empty() && std::filesystem::is_directory(s.options.static_dir)) {
    server.set_mount_point("/", s.options.static_dir);
  }

  server.Get("/api/state", [this, &s](const httplib::Request&, httplib::Response& res) {
    const auto pending = annotator_.Pending();
    std::lock_guard lock(s.mu);
    json rounds = json::array();
    for (const auto& r : s.state.rounds) {
      rounds.push_back({{"index", r.index},
                        {"budget", r.budget},
                        {"selected", r.selected.size()},
                        {"covered_words", r.covered_words},
                        {"mean_confidence", r.MeanConfidence()},
                        {"prompt_tokens", r.prompt_tokens}});
    }
    json history = json::array();
    for (const auto& h : s.history) {
      history.push_back({{"round", h.round},
                         {"mla", h.report.mla},
                         {"pta", h.report.pta},
                         {"rta", h.report.rta}});
    }
    Reply(res, 200,
          {{"budget", s.state.config.budget},
           {"budget_remaining", s.state.budget_remaining},
           {"labeled", s.state.labeled.size()},
           {"unlabeled", s.state.unlabeled.size()},
           {"total_prompt_tokens", s.state.total_prompt_tokens},
           {"rounds", rounds},
           {"metrics_history", history},
           {"awaiting_annotation", pending.awaiting},
           {"pending_round", pending.round},
           {"outstanding", pending.outstanding},
           {"finished", s.state.finished},
           {"error", s.loop_error.empty() ? json(nullptr) : json(s.loop_error)},
           {"types", s.corpus.catalog().types()}});
  });

  server.Get("/api/pending", [this](const httplib::Request&, httplib::Response& res) {
    const auto pending = annotator_.Pending();
    json items = json::array();
    if (pending.awaiting) {
      for (const auto& p : pending.items) {
        items.push_back({{"round", p.round},
                         {"log_id", Index(p.log_id)},
                         {"raw", p.raw},
                         {"words", p.words},
                         {"guess", OptionalTemplate(p.guess)},
                         {"submitted", OptionalTemplate(p.submitted)},
                         {"submitter", p.submitter},
                         {"submitted_at", p.submitted_at}});
      }
    }
    Reply(res, 200,
          {{"round", pending.round},
           {"awaiting", pending.awaiting},
           {"outstanding", pending.outstanding},
           {"items", items}});
  });

  server.Post("/api/annotations", [this](const httplib::Request& req, httplib::Response& res) {
    json body = json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.is_object() || !body.contains("log_id") ||
        !body["log_id"].is_number_unsigned() || !body.contains("template") ||
        !body["template"].is_string()) {
      ReplyError(res, 400, "BadRequest", "expected {\"log_id\": n, \"template\": \"...\"}");
      return;
    }
    const LogId id{body["log_id"].get<std::uint32_t>()};
    const std::string submitter = body.value("submitter", std::string("anonymous"));
    const auto result = annotator_.Submit(id, body["template"].get<std::string>(), submitter);
    switch (result.status) {
      case InteractiveAnnotator::SubmitStatus::kAccepted:
        Reply(res, 200, {{"log_id", Index(id)}, {"outstanding", result.outstanding}});
        return;
      case InteractiveAnnotator::SubmitStatus::kMalformed:
        ReplyError(res, 400, result.error, result.message);
        return;
      case InteractiveAnnotator::SubmitStatus::kUnknownLog:
        ReplyError(res, 404, "UnknownId", result.message);
        return;
      case InteractiveAnnotator::SubmitStatus::kDuplicate:
        ReplyError(res, 409, "Duplicate", result.message);
        return;
    }
  });

  server.Post("/api/rounds/advance", [this](const httplib::Request&, httplib::Response& res) {
    std::size_t outstanding = 0;
    switch (annotator_.Advance(&outstanding)) {
      case InteractiveAnnotator::AdvanceStatus::kAdvanced:
        Reply(res, 200, {{"advanced", true}});
        return;
      case InteractiveAnnotator::AdvanceStatus::kOutstanding:
        ReplyError(res, 423, "Outstanding",
                   std::to_string(outstanding) + " pending item(s) still need a template");
        return;
      case InteractiveAnnotator::AdvanceStatus::kNoRound:
        ReplyError(res, 409, "NoRound", "no round is waiting for annotation");
        return;
    }
  });

  server.Get("/api/predictions", [&s](const httplib::Request&, httplib::Response& res) {
    std::lock_guard lock(s.mu);
    std::set<LogId> labeled;
    for (const auto& l : s.state.labeled) labeled.insert(l.log.id);
    const auto templates = s.CurrentTemplatesLocked();
    json items = json::array();
    for (const auto& r : s.corpus.records()) {
      json item = {{"id", Index(r.id)}, {"log", r.JoinedWords()}};
      auto t = templates.find(r.id);
      item["template"] = t == templates.end() ? json(nullptr) : json(t->second.Render());
      if (labeled.contains(r.id)) {
        item["source"] = "annotated";
      } else if (s.latest.contains(r.id)) {
        item["source"] = t == templates.end() ? "failed" : "predicted";
        if (auto c = s.latest_confidence.find(r.id); c != s.latest_confidence.end()) {
          item["confidence"] = c->second;
        }
      } else {
        item["source"] = "missing";
      }
      items.push_back(std::move(item));
    }
    Reply(res, 200, {{"round", s.latest_round}, {"predictions", items}});
  });

  server.Get("/api/metrics", [&s](const httplib::Request&, httplib::Response& res) {
    if (!s.corpus.fully_labeled()) {
      ReplyError(res, 404, "NoGroundTruth", "corpus has no ground-truth templates");
      return;
    }
    std::lock_guard lock(s.mu);
    const EvalReport report = Evaluate(s.CurrentTemplatesLocked(), s.corpus);
    Reply(res, 200, json::parse(report.ToJson()));
  });
}

AnnotationService::~AnnotationService() { Stop(); }

int AnnotationService::Start() {
  Impl& s = *impl_;
  int port = s.options.port;
  if (port == 0) {
    port = s.server.bind_to_any_port(s.options.host);
  } else if (!s.server.bind_to_port(s.options.host, port)) {
    port = -1;
  }
  if (port < 0) {
    throw Error(ErrorCode::kIoError,
                "cannot bind " + s.options.host + ":" + std::to_string(s.options.port));
  }

  std::optional<RunState> resume;
  const auto paths = ArtifactPathsFor(s.config.output_dir);
  if (s.config.resume && std::filesystem::exists(paths.run_state)) {
    resume = LoadRunState(paths.run_state, s.corpus);
    s.state = *resume;
  } else {
    s.state.config = s.config.loop;
    s.state.budget_remaining = s.config.loop.budget;
    for (const auto& r : s.corpus.records()) s.state.unlabeled.push_back(r.id);
  }

  s.loop_thread = std::thread([this, &s, resume = std::move(resume), paths]() mutable {
    LoopHooks hooks;
    hooks.on_round = [&s, paths](const RunState& state) {
      std::filesystem::create_directories(s.config.output_dir);
      SaveRunStateAtomic(state, paths.run_state);
      std::lock_guard lock(s.mu);
      s.state = state;
    };
    hooks.on_predictions = [&s](int round, const std::vector<Prediction>& predictions,
                                const std::vector<ConfidenceReport>& reports) {
      std::lock_guard lock(s.mu);
      s.latest.clear();
      s.latest_confidence.clear();
      for (const auto& p : predictions) s.latest[p.log_id] = p;
      for (const auto& c : reports) s.latest_confidence[c.log_id] = c.score;
      s.latest_round = round;
      if (s.corpus.fully_labeled()) {
        s.history.push_back({round, Evaluate(s.CurrentTemplatesLocked(), s.corpus)});
      }
    };
    try {
      RunState final_state = RunAnnotationLoop(s.corpus, annotator_, s.gateways.gateway(),
                                               s.embeddings, s.config.loop, hooks, std::move(resume));
      WriteArtifacts(final_state, s.corpus, s.config.output_dir);
      std::lock_guard lock(s.mu);
      s.state = std::move(final_state);
      s.loop_done = true;
    } catch (const std::exception& e) {
      std::lock_guard lock(s.mu);
      s.loop_error = e.what();
      s.loop_done = true;
    }
  });
  s.listen_thread = std::thread([&s] { s.server.listen_after_bind(); });
  s.server.wait_until_ready();
  return port;
}

void AnnotationService::Wait() {
  if (impl_->listen_thread.joinable()) impl_->listen_thread.join();
}

void AnnotationService::RequestStop() {
  annotator_.Close();
  impl_->server.stop();
}

void AnnotationService::Stop() {
  if (!impl_) return;
  RequestStop();
  if (impl_->listen_thread.joinable()) impl_->listen_thread.join();
  if (impl_->loop_thread.joinable()) impl_->loop_thread.join();
}

}  // namespace logtmpl
