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

// Random log generators shared by property tests and the acceptance suite.

#ifndef LOGTMPL_TESTS_SUPPORT_RANDOM_LOGS_HPP_
#define LOGTMPL_TESTS_SUPPORT_RANDOM_LOGS_HPP_

#include <random>
#include <string>
#include <vector>

#include "logtmpl/template.hpp"

namespace logtmpl::testing {

// A small vocabulary so random logs share words often.
inline const std::vector<std::string>& SharedVocabulary() {
  static const std::vector<std::string> kWords = {
      "GET",  "POST",   "PUT",       "block",     "blocks",  "blk_17", "blk_42", "10.0.0.1",
      "10.0.0.2", "done", "failed", "connection", "connect", "200",    "404",    "1004"};
  return kWords;
}

inline LogRecord RandomLog(std::mt19937_64& rng, std::uint32_t id, std::size_t max_words) {
  const auto& vocab = SharedVocabulary();
  const std::size_t n = 1 + rng() % max_words;
  std::string raw;
  for (std::size_t i = 0; i < n; ++i) {
    if (i) raw += ' ';
    raw += vocab[rng() % vocab.size()];
  }
  return TokenizeLog(raw, LogId{id});
}

}  // namespace logtmpl::testing

#endif  // LOGTMPL_TESTS_SUPPORT_RANDOM_LOGS_HPP_
