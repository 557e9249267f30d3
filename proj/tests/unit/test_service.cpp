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

#include <chrono>
#include <filesystem>
#include <fstream>
#include <thread>

#include <doctest.h>
#include <httplib.h>
#include <json.hpp>

#include "logtmpl/error.hpp"
#include "logtmpl/service.hpp"
#include "synthetic.hpp"

namespace logtmpl {
namespace {

using nlohmann::json;

std::filesystem::path TempDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

RunConfig ServiceConfig(const std::filesystem::path& out) {
  RunConfig config;
  config.loop.budget = 10;
  config.loop.b0 = 2;
  config.loop.b1 = 2;
  config.loop.concurrency = 2;
  config.corpus_path = "in-memory";
  config.output_dir = out.string();
  return config;
}

struct Client {
  explicit Client(int port, std::string token = "") : http("127.0.0.1", port) {
    if (!token.empty()) http.set_bearer_token_auth(token);
  }

  std::pair<int, json> Get(const std::string& path) {
    auto res = http.Get(path);
    REQUIRE(res);
    return {res->status, json::parse(res->body, nullptr, false)};
  }
  std::pair<int, json> Post(const std::string& path, const json& body) {
    auto res = http.Post(path, body.dump(), "application/json");
    REQUIRE(res);
    return {res->status, json::parse(res->body, nullptr, false)};
  }
  json WaitForRound(int round) {
    for (int i = 0; i < 500; ++i) {
      auto [status, body] = Get("/api/pending");
      if (status == 200 && body["awaiting"] == true && body["round"] == round) return body;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    FAIL("round " << round << " never became pending");
    return {};
  }
  json WaitForFinish() {
    for (int i = 0; i < 500; ++i) {
      auto [status, body] = Get("/api/state");
      if (body["finished"] == true || !body["error"].is_null()) return body;
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    FAIL("run never finished");
    return {};
  }

  httplib::Client http;
};

void SubmitTruth(Client& client, const Corpus& corpus, const json& pending) {
  for (const auto& item : pending["items"]) {
    const LogId id{item["log_id"].get<std::uint32_t>()};
    auto [status, body] =
        client.Post("/api/annotations", {{"log_id", Index(id)},
                                         {"template", corpus.GroundTruth(id)->Render()},
                                         {"submitter", "tester"}});
    CHECK(status == 200);
  }
}

TEST_CASE("interactive walkthrough over HTTP") {
  const Corpus corpus = testing::SyntheticCorpus(40, 5, 3);
  const auto out = TempDir("logtmpl_service_walkthrough");
  const auto ui = out / "ui";
  std::filesystem::create_directories(ui);
  std::ofstream(ui / "index.html") << "<html>annotate</html>";

  AnnotationService service(corpus, ServiceConfig(out), {"127.0.0.1", 0, ui.string(), ""});
  const int port = service.Start();
  Client client(port);

  // Static assets are served at the root.
  auto page = client.http.Get("/index.html");
  REQUIRE(page);
  CHECK(page->body.find("annotate") != std::string::npos);

  json pending = client.WaitForRound(0);
  REQUIRE(pending["items"].size() == 2);
  CHECK(pending["outstanding"] == 2);
  const auto first = pending["items"][0];
  const LogId first_id{first["log_id"].get<std::uint32_t>()};
  CHECK(first["raw"] == corpus.Get(first_id).raw);
  CHECK(first["guess"].is_null());

  // Bad submissions.
  auto [bogus_status, bogus] =
      client.Post("/api/annotations", {{"log_id", Index(first_id)}, {"template", "[BOGUS]"}});
  CHECK(bogus_status == 400);
  CHECK(bogus["error"] == "UnknownType");
  auto [short_status, short_body] =
      client.Post("/api/annotations", {{"log_id", Index(first_id)}, {"template", "<x>"}});
  CHECK(short_status == 400);
  CHECK(short_body["error"] == "WordCountMismatch");
  CHECK(client.Post("/api/annotations", {{"template", "<x>"}}).first == 400);
  CHECK(client.Post("/api/annotations", {{"log_id", 9999}, {"template", "<x>"}}).first == 404);

  // Advancing early is refused.
  auto [early_status, early] = client.Post("/api/rounds/advance", json::object());
  CHECK(early_status == 423);
  CHECK(early["error"] == "Outstanding");

  auto [ok_status, ok] = client.Post(
      "/api/annotations",
      {{"log_id", Index(first_id)}, {"template", corpus.GroundTruth(first_id)->Render()}});
  CHECK(ok_status == 200);
  CHECK(ok["outstanding"] == 1);
  CHECK(client.Get("/api/pending").second["outstanding"] == 1);
  auto [dup_status, dup] = client.Post(
      "/api/annotations",
      {{"log_id", Index(first_id)}, {"template", corpus.GroundTruth(first_id)->Render()}});
  CHECK(dup_status == 409);

  // Reads have no side effects.
  CHECK(client.Get("/api/pending").second == client.Get("/api/pending").second);

  const auto second = pending["items"][1];
  const LogId second_id{second["log_id"].get<std::uint32_t>()};
  CHECK(client.Post("/api/annotations", {{"log_id", Index(second_id)},
                                         {"template", corpus.GroundTruth(second_id)->Render()}})
            .first == 200);
  CHECK(client.Post("/api/rounds/advance", json::object()).first == 200);

  // Round 1 uses the second startup budget and carries model guesses.
  pending = client.WaitForRound(1);
  CHECK(pending["items"].size() == 2);
  for (const auto& item : pending["items"]) CHECK(item["guess"].is_string());
  auto [pred_status, preds] = client.Get("/api/predictions");
  CHECK(pred_status == 200);
  CHECK(preds["predictions"].size() == corpus.size());
  auto [metrics_status, metrics] = client.Get("/api/metrics");
  CHECK(metrics_status == 200);
  CHECK(metrics["mla"].get<double>() > 0.0);
  SubmitTruth(client, corpus, pending);
  CHECK(client.Post("/api/rounds/advance", json::object()).first == 200);

  // Round 2 follows the adaptive rule on the identified-word counts.
  pending = client.WaitForRound(2);
  auto [state_status, state] = client.Get("/api/state");
  CHECK(state_status == 200);
  REQUIRE(state["rounds"].size() == 2);
  const std::size_t w0 = state["rounds"][0]["covered_words"];
  const std::size_t w1 = state["rounds"][1]["covered_words"];
  const std::size_t expected = AdaptiveBudget(2, w1, w0, 6);
  CHECK(pending["items"].size() == expected);
  CHECK(state["budget_remaining"] == 6);
  CHECK(state["labeled"] == 4);
  CHECK(state["metrics_history"].size() >= 1);

  // Drive the run to completion.
  int round = 2;
  while (true) {
    SubmitTruth(client, corpus, pending);
    CHECK(client.Post("/api/rounds/advance", json::object()).first == 200);
    ++round;
    bool next = false;
    for (int i = 0; i < 500; ++i) {
      const auto s = client.Get("/api/state").second;
      if (s["finished"] == true) break;
      if (s["awaiting_annotation"] == true && s["pending_round"] == round) {
        next = true;
        break;
      }
      std::this_thread::sleep_for(std::chrono::milliseconds(20));
    }
    if (!next) break;
    pending = client.Get("/api/pending").second;
  }
  const auto final_state = client.WaitForFinish();
  CHECK(final_state["finished"] == true);
  CHECK(final_state["budget_remaining"] == 0);
  CHECK(client.Post("/api/rounds/advance", json::object()).first == 409);
  service.Stop();

  const auto paths = ArtifactPathsFor(out.string());
  CHECK(std::filesystem::exists(paths.run_state));
  CHECK(std::filesystem::exists(paths.predictions));
  CHECK(std::filesystem::exists(paths.report));
  CHECK(std::filesystem::exists(paths.rounds));
  std::filesystem::remove_all(out);
}

TEST_CASE("bearer token guards the api") {
  const Corpus corpus = testing::SyntheticCorpus(20, 4, 5);
  const auto out = TempDir("logtmpl_service_token");
  AnnotationService service(corpus, ServiceConfig(out), {"127.0.0.1", 0, "", "letmein"});
  const int port = service.Start();
  Client anonymous(port);
  CHECK(anonymous.Get("/api/state").first == 401);
  Client wrong(port, "nope");
  CHECK(wrong.Get("/api/state").first == 401);
  Client authorized(port, "letmein");
  CHECK(authorized.Get("/api/state").first == 200);
  service.Stop();
  std::filesystem::remove_all(out);
}

TEST_CASE("stopping mid-round reports the annotator as unavailable") {
  const Corpus corpus = testing::SyntheticCorpus(20, 4, 6);
  const auto out = TempDir("logtmpl_service_stop");
  {
    AnnotationService service(corpus, ServiceConfig(out), {"127.0.0.1", 0, "", ""});
    Client client(service.Start());
    client.WaitForRound(0);
  }
  // Round 0 never completed, so nothing was persisted.
  CHECK_FALSE(std::filesystem::exists(ArtifactPathsFor(out.string()).run_state));
  std::filesystem::remove_all(out);
}

TEST_CASE("interactive annotator without the server") {
  InteractiveAnnotator annotator(TypeCatalog::Default());
  CHECK(annotator.Advance() == InteractiveAnnotator::AdvanceStatus::kNoRound);
  CHECK(annotator.Submit(LogId{0}, "<a>", "x").status ==
        InteractiveAnnotator::SubmitStatus::kUnknownLog);
  std::vector<PendingItem> items = {{LogId{3}, "GET /x", std::nullopt}};
  std::vector<Template> result;
  std::thread loop([&] { result = annotator.Annotate(0, items); });
  while (!annotator.Pending().awaiting) std::this_thread::sleep_for(std::chrono::milliseconds(1));
  CHECK(annotator.Submit(LogId{3}, "<GET> [PATH]", "x").status ==
        InteractiveAnnotator::SubmitStatus::kAccepted);
  CHECK(annotator.Advance() == InteractiveAnnotator::AdvanceStatus::kAdvanced);
  loop.join();
  REQUIRE(result.size() == 1);
  CHECK(result[0].Render() == "<GET> [PATH]");

  annotator.Close();
  CHECK_THROWS_AS(annotator.Annotate(1, items), Error);
}

}  // namespace
}  // namespace logtmpl
