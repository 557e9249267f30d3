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
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "http_util.hpp"
#include "logtmpl/error.hpp"
#include "logtmpl/llm_gateway.hpp"

namespace logtmpl {

using nlohmann::json;

RemoteGateway::RemoteGateway(RemoteGatewayConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "remote gateway needs an endpoint");
  }
  if (config_.max_attempts < 1) config_.max_attempts = 1;
}

RawCompletion RemoteGateway::Complete(const InferenceRequest& request) {
  const auto endpoint = internal::SplitEndpoint(config_.endpoint);
  httplib::Client client(endpoint.scheme_host_port);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (auto key = internal::ApiKeyFromEnv(config_.api_key_env); !key.empty()) {
    headers.emplace("Authorization", "Bearer " + key);
  }

  json messages = json::array();
  for (const auto& m : request.prompt.Messages()) {
    messages.push_back({{"role", m.role}, {"content", m.content}});
  }
  const json body = {{"model", config_.model},
                     {"messages", std::move(messages)},
                     {"temperature", config_.temperature},
                     {"logprobs", true}};
  const std::string payload = body.dump();

  std::string last_error;
  int backoff_ms = config_.initial_backoff_ms;
  for (int attempt = 1; attempt <= config_.max_attempts; ++attempt) {
    auto res = client.Post(endpoint.path_prefix + "/chat/completions", headers, payload,
                           "application/json");
    if (res && res->status == 200) return ParseChatCompletionBody(res->body);
    if (!res) {
      last_error = httplib::to_string(res.error());
    } else {
      last_error = "HTTP " + std::to_string(res->status);
      // Client errors other than rate limiting will not improve on retry.
      if (res->status >= 400 && res->status < 500 && res->status != 429) break;
    }
    if (attempt < config_.max_attempts) {
      std::this_thread::sleep_for(std::chrono::milliseconds(backoff_ms));
      backoff_ms *= 2;
    }
  }
  throw Error(ErrorCode::kGatewayError, "chat completion failed: " + last_error);
}

}  // namespace logtmpl
