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

#include <algorithm>
#include <future>

#include <httplib.h>
#include <json.hpp>

#include "http_util.hpp"
#include "logtmpl/embedding.hpp"
#include "logtmpl/error.hpp"

namespace logtmpl {

using nlohmann::json;

ExternalEmbeddingProvider::ExternalEmbeddingProvider(ExternalEmbeddingConfig config)
    : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw Error(ErrorCode::kInvalidConfig, "external embedding provider needs an endpoint");
  }
  config_.batch_size = std::max<std::size_t>(1, config_.batch_size);
  config_.max_in_flight = std::max<std::size_t>(1, config_.max_in_flight);
}

std::vector<EmbeddingVector> ExternalEmbeddingProvider::FetchChunk(
    std::span<const std::string> words) const {
  const auto endpoint = internal::SplitEndpoint(config_.endpoint);
  httplib::Client client(endpoint.scheme_host_port);
  client.set_connection_timeout(config_.timeout_seconds, 0);
  client.set_read_timeout(config_.timeout_seconds, 0);
  httplib::Headers headers;
  if (auto key = internal::ApiKeyFromEnv(config_.api_key_env); !key.empty()) {
    headers.emplace("Authorization", "Bearer " + key);
  }

  json body = {{"input", std::vector<std::string>(words.begin(), words.end())},
               {"model", config_.model}};
  auto res = client.Post(endpoint.path_prefix + "/embeddings", headers, body.dump(),
                         "application/json");
  if (!res) {
    throw Error(ErrorCode::kProviderUnavailable,
                "embeddings request failed: " + httplib::to_string(res.error()));
  }
  if (res->status != 200) {
    throw Error(ErrorCode::kProviderUnavailable,
                "embeddings endpoint returned HTTP " + std::to_string(res->status));
  }

  std::vector<EmbeddingVector> out(words.size());
  try {
    const auto parsed = json::parse(res->body);
    const auto& data = parsed.at("data");
    if (data.size() != words.size()) {
      throw Error(ErrorCode::kProviderUnavailable, "embeddings response has wrong item count");
    }
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& item = data[i];
      const std::size_t index = item.contains("index") ? item.at("index").get<std::size_t>() : i;
      if (index >= out.size()) {
        throw Error(ErrorCode::kProviderUnavailable, "embeddings response index out of range");
      }
      EmbeddingVector v(item.at("embedding").get<std::vector<double>>());
      if (config_.dimension != 0 && v.dimension() != config_.dimension) {
        throw Error(ErrorCode::kDimensionMismatch,
                    "service returned dimension " + std::to_string(v.dimension()));
      }
      out[index] = v.Normalized();
    }
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kProviderUnavailable, std::string("malformed embeddings body: ") + e.what());
  }
  return out;
}

std::vector<EmbeddingVector> ExternalEmbeddingProvider::EmbedBatch(
    std::span<const std::string> words) const {
  for (const auto& w : words) {
    if (w.empty()) throw Error(ErrorCode::kEmptyWord, "cannot embed an empty word");
  }
  std::vector<EmbeddingVector> out;
  out.reserve(words.size());
  std::size_t next = 0;
  while (next < words.size()) {
    // One wave of at most max_in_flight concurrent chunk requests.
    std::vector<std::future<std::vector<EmbeddingVector>>> wave;
    for (std::size_t k = 0; k < config_.max_in_flight && next < words.size(); ++k) {
      const std::size_t len = std::min(config_.batch_size, words.size() - next);
      auto chunk = words.subspan(next, len);
      wave.push_back(std::async(std::launch::async, [this, chunk] { return FetchChunk(chunk); }));
      next += len;
    }
    for (auto& f : wave) {
      for (auto& v : f.get()) out.push_back(std::move(v));
    }
  }
  return out;
}

}  // namespace logtmpl
