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

#include <optional>
#include <string>

namespace wolfpack::attack {

enum class InitMode { kUniform, kMinQtot };
enum class FollowupMode { kKl, kL2, kRandom };
enum class StepMode { kPlanner, kRandom };
enum class BudgetMode { kScheduled, kDeviationOnly };

InitMode parse_init_mode(const std::string& s);
FollowupMode parse_followup_mode(const std::string& s);
StepMode parse_step_mode(const std::string& s);
BudgetMode parse_budget_mode(const std::string& s);
std::string to_string(InitMode v);
std::string to_string(FollowupMode v);
std::string to_string(StepMode v);
std::string to_string(BudgetMode v);

struct AttackConfig {
  int k_wp = 1;  // initial attacks per episode
  int t_wp = 3;  // follow-up steps after each initial attack
  int m = 1;     // follow-up group size
  InitMode init = InitMode::kUniform;
  FollowupMode followup = FollowupMode::kKl;
  StepMode step = StepMode::kPlanner;
  double alpha_virtual = 5e-4;
  double kl_temperature = 1.0;
  BudgetMode budget = BudgetMode::kScheduled;
  // Fire an initial attack when the remaining steps are just enough to
  // spend the remaining windows.
  bool force_deadline = true;

  int total_budget() const { return k_wp * (t_wp + 1); }

  // Throws ConfigError for m > n-1 or negative counts. Returns a warning
  // when the stricter m < floor((n-1)/2) guideline is not met.
  std::optional<std::string> validate(int n_agents) const;
};

}  // namespace wolfpack::attack
