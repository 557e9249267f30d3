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

// The interactive annotator and the HTTP service that drives an annotation
// run from a browser or any JSON client.

#ifndef LOGTMPL_SERVICE_HPP_
#define LOGTMPL_SERVICE_HPP_

#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "logtmpl/annotation_loop.hpp"
#include "logtmpl/run_config.hpp"

namespace logtmpl {

struct PendingAnnotation {
  int round = 0;
  LogId log_id{};
  std::string raw;
  std::vector<std::string> words;
  std::optional<Template> guess;
  std::optional<Template> submitted;
  std::string submitter;
  std::string submitted_at;  // ISO-8601 UTC
};

// Blocks the annotation loop at each round until every pending item has a
// template and the round is explicitly advanced.
class InteractiveAnnotator final : public Annotator {
 public:
  explicit InteractiveAnnotator(TypeCatalog catalog) : catalog_(std::move(catalog)) {}

  std::vector<Template> Annotate(int round, std::span<const PendingItem> items) override;

  enum class SubmitStatus { kAccepted, kMalformed, kUnknownLog, kDuplicate };
  struct SubmitResult {
    SubmitStatus status = SubmitStatus::kAccepted;
    std::string error;    // ErrorCode name for kMalformed
    std::string message;
    std::size_t outstanding = 0;
  };
  SubmitResult Submit(LogId id, std::string_view template_text, const std::string& submitter);

  enum class AdvanceStatus { kAdvanced, kOutstanding, kNoRound };
  AdvanceStatus Advance(std::size_t* outstanding = nullptr);

  struct Snapshot {
    bool awaiting = false;
    int round = -1;
    std::vector<PendingAnnotation> items;
    std::size_t outstanding = 0;
  };
  Snapshot Pending() const;

  // Wakes a blocked Annotate, which then throws kAnnotatorUnavailable, as
  // does every later call.
  void Close();

 private:
  std::size_t OutstandingLocked() const;

  TypeCatalog catalog_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  bool awaiting_ = false;
  bool advance_ = false;
  bool closed_ = false;
  int round_ = -1;
  std::vector<PendingAnnotation> items_;
};

struct ServiceOptions {
  std::string host = "127.0.0.1";
  int port = 8080;  // 0 picks a free port
  std::string static_dir;    // served at / when non-empty
  std::string bearer_token;  // required on /api when non-empty
};

// Runs one annotation loop in the background with an InteractiveAnnotator and
// exposes it under /api.
class AnnotationService {
 public:
  AnnotationService(const Corpus& corpus, RunConfig config, ServiceOptions options);
  ~AnnotationService();
  AnnotationService(const AnnotationService&) = delete;
  AnnotationService& operator=(const AnnotationService&) = delete;

  // Binds, starts the loop and the listener threads, and returns the bound port.
  int Start();
  // Blocks until the listener stops.
  void Wait();
  void Stop();
  // Asks the listener and the loop to wind down without joining them.
  void RequestStop();

  InteractiveAnnotator& annotator() { return annotator_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  InteractiveAnnotator annotator_;
};

}  // namespace logtmpl

#endif  // LOGTMPL_SERVICE_HPP_
