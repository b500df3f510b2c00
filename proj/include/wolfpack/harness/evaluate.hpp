// Copyright 2026 The Wolfpack Authors. All rights reserved.
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

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wolfpack/harness/runner.hpp"

namespace wolfpack::harness {

struct EvalRequest {
  AttackerKind attacker = AttackerKind::kNatural;
  int episodes = 100;
  int k = 4;  // unified attacked-step budget
  std::uint64_t seed = 0;
  double epsilon = 0;
  int jobs = 1;
  bool trace_step_probs = false;
};

struct EvalSummary {
  std::string attacker;
  int k = 0;
  int k_wp = 0;
  int episodes = 0;
  double mean_return = 0;
  double std_return = 0;
  double mean_attacked_steps = 0;
  int min_attacked_steps = 0;
  int max_attacked_steps = 0;
  std::vector<double> returns;
  std::vector<int> attacked_steps;

  nlohmann::json to_json() const;
};

// Episode e uses streams keyed by (seed, e), so results do not depend on jobs.
// Attack and step-probability rows are appended to `rows` in episode order.
EvalSummary evaluate(const Models& victim, const Models& attacker_models, const EvalRequest& request,
                     std::vector<nlohmann::json>* rows = nullptr);

inline EvalSummary evaluate(const Models& models, const EvalRequest& request,
                            std::vector<nlohmann::json>* rows = nullptr) {
  return evaluate(models, models, request, rows);
}

}  // namespace wolfpack::harness
