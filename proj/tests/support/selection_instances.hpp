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

// Random instances of the per-round selection problem.

#ifndef LOGTMPL_TESTS_SUPPORT_SELECTION_INSTANCES_HPP_
#define LOGTMPL_TESTS_SUPPORT_SELECTION_INSTANCES_HPP_

#include <random>
#include <set>
#include <vector>

#include "logtmpl/selection.hpp"

namespace logtmpl::testing {

struct SelectionInstance {
  std::vector<LogId> ids;
  RepresentativeMap reps;
  ConfidenceMap conf;
  // Same data by position, for the oracles.
  std::vector<std::set<std::size_t>> rep_index;
  std::vector<double> conf_index;
};

// Each log represents itself plus each other log with probability `density`.
inline SelectionInstance RandomSelectionInstance(std::mt19937_64& rng, std::size_t n,
                                                 double density = 0.3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  SelectionInstance inst;
  for (std::size_t i = 0; i < n; ++i) {
    const LogId id{static_cast<std::uint32_t>(i)};
    inst.ids.push_back(id);
    std::set<std::size_t> members{i};
    for (std::size_t j = 0; j < n; ++j) {
      if (j != i && u(rng) < density) members.insert(j);
    }
    RepresentativeSet rs;
    rs.anchor = id;
    for (std::size_t j : members) rs.members.push_back(LogId{static_cast<std::uint32_t>(j)});
    inst.reps[id] = rs;
    inst.rep_index.push_back(members);
    const double c = u(rng);
    inst.conf[id] = c;
    inst.conf_index.push_back(c);
  }
  return inst;
}

}  // namespace logtmpl::testing

#endif  // LOGTMPL_TESTS_SUPPORT_SELECTION_INSTANCES_HPP_
