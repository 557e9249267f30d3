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

#include "synthetic.hpp"

#include <algorithm>
#include <fstream>
#include <random>

namespace logtmpl::testing {

const std::vector<std::string>& SyntheticTemplates() {
  static const std::vector<std::string> kTemplates = {
      "Receiving block [ID] src: [ADDRESS] dest: [ADDRESS]",
      "PacketResponder [NUM] for block [ID] terminating",
      "Received block [ID] of size [NUM] from [IP]",
      "addStoredBlock: blockMap updated: [ADDRESS] is added to [ID] size [NUM]",
      "Verification succeeded for [ID]",
      "Deleting block [ID] file [PATH]",
      "GET [PATH] HTTP/1.1 [STATUS] [LATENCY]",
      "Connection from [IP] closed after [LATENCY]",
      "session opened for user [VAR] at [TIME] on [DATE]",
      "request [ID] failed with error [CODE]",
  };
  return kTemplates;
}

namespace {

std::string Value(const std::string& type, std::mt19937_64& rng) {
  auto num = [&rng](int lo, int hi) {
    return std::to_string(std::uniform_int_distribution<int>(lo, hi)(rng));
  };
  auto ip = [&] { return "10." + num(0, 255) + "." + num(0, 255) + "." + num(1, 254); };
  if (type == "ID") return "blk_" + num(100000, 999999) + num(1000, 9999);
  if (type == "ADDRESS") return ip() + ":" + num(50000, 50020);
  if (type == "IP") return ip();
  if (type == "NUM") return num(0, 99999);
  if (type == "PATH") {
    static const char* kDirs[] = {"user", "tmp", "data", "logs", "var"};
    return std::string("/") + kDirs[rng() % 5] + "/" + kDirs[rng() % 5] + "/part-" + num(0, 999);
  }
  if (type == "STATUS") {
    static const char* kCodes[] = {"200", "201", "404", "500", "503"};
    return kCodes[rng() % 5];
  }
  if (type == "LATENCY") return num(1, 999) + "ms";
  if (type == "VAR") {
    static const char* kUsers[] = {"alice", "bob", "carol", "dave", "erin", "frank"};
    return kUsers[rng() % 6];
  }
  if (type == "TIME") return num(10, 23) + ":" + num(10, 59) + ":" + num(10, 59);
  if (type == "DATE") return "2026-" + num(10, 12) + "-" + num(10, 28);
  if (type == "CODE") return "E" + num(1000, 9999);
  return "x" + num(0, 9);
}

}  // namespace

Corpus SyntheticCorpus(std::size_t count, std::size_t templates, std::uint64_t seed) {
  const auto& all = SyntheticTemplates();
  templates = std::min(templates, all.size());
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> order(count);
  for (std::size_t i = 0; i < count; ++i) order[i] = i % templates;
  std::shuffle(order.begin(), order.end(), rng);

  Corpus corpus;
  for (std::size_t which : order) {
    const Template t = ParseTemplate(all[which], corpus.catalog());
    std::string raw;
    for (const auto& tok : t.tokens) {
      if (!raw.empty()) raw += ' ';
      raw += tok.is_placeholder() ? Value(tok.value, rng) : tok.value;
    }
    corpus.Add(raw, t);
  }
  return corpus;
}

void WriteLogpaiCsv(const Corpus& corpus, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  out << "LineId,Content,EventId,EventTemplate\n";
  auto quote = [](const std::string& s) {
    std::string q = "\"";
    for (char c : s) q += c == '"' ? std::string("\"\"") : std::string(1, c);
    return q + "\"";
  };
  for (const auto& r : corpus.records()) {
    const Template* t = corpus.GroundTruth(r.id);
    std::string event;
    for (const auto& tok : t->tokens) {
      if (!event.empty()) event += ' ';
      event += tok.is_placeholder() ? "<*>" : tok.value;
    }
    out << Index(r.id) + 1 << ',' << quote(r.raw) << ",E" << ',' << quote(event) << '\n';
  }
}

}  // namespace logtmpl::testing
