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

// Internal helpers for the OpenAI-compatible HTTP clients.

#ifndef LOGTMPL_SRC_HTTP_UTIL_HPP_
#define LOGTMPL_SRC_HTTP_UTIL_HPP_

#include <cstdlib>
#include <string>

namespace logtmpl::internal {

struct Endpoint {
  std::string scheme_host_port;  // "http://host:port"
  std::string path_prefix;       // "/v1" or ""
};

// Splits "http://host:port/v1/" into its origin and path prefix (trailing
// slash dropped).
inline Endpoint SplitEndpoint(const std::string& url) {
  Endpoint out;
  const auto scheme_end = url.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = url.find('/', host_start);
  if (path_start == std::string::npos) {
    out.scheme_host_port = url;
  } else {
    out.scheme_host_port = url.substr(0, path_start);
    out.path_prefix = url.substr(path_start);
  }
  while (!out.path_prefix.empty() && out.path_prefix.back() == '/') out.path_prefix.pop_back();
  return out;
}

inline std::string ApiKeyFromEnv(const std::string& var) {
  if (var.empty()) return {};
  const char* value = std::getenv(var.c_str());
  return value ? std::string(value) : std::string();
}

}  // namespace logtmpl::internal

#endif  // LOGTMPL_SRC_HTTP_UTIL_HPP_
