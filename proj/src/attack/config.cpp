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

#include "wolfpack/attack/config.hpp"

#include "wolfpack/errors.hpp"

namespace wolfpack::attack {

InitMode parse_init_mode(const std::string& s) {
  if (s == "uniform") return InitMode::kUniform;
  if (s == "min_qtot") return InitMode::kMinQtot;
  throw ConfigError("unknown init_mode: " + s);
}

FollowupMode parse_followup_mode(const std::string& s) {
  if (s == "kl") return FollowupMode::kKl;
  if (s == "l2") return FollowupMode::kL2;
  if (s == "random") return FollowupMode::kRandom;
  throw ConfigError("unknown followup_mode: " + s);
}

StepMode parse_step_mode(const std::string& s) {
  if (s == "planner") return StepMode::kPlanner;
  if (s == "random") return StepMode::kRandom;
  throw ConfigError("unknown step_mode: " + s);
}

BudgetMode parse_budget_mode(const std::string& s) {
  if (s == "scheduled") return BudgetMode::kScheduled;
  if (s == "deviation_only") return BudgetMode::kDeviationOnly;
  throw ConfigError("unknown budget_mode: " + s);
}

std::string to_string(InitMode v) { return v == InitMode::kUniform ? "uniform" : "min_qtot"; }

std::string to_string(FollowupMode v) {
  switch (v) {
    case FollowupMode::kKl:
      return "kl";
    case FollowupMode::kL2:
      return "l2";
    case FollowupMode::kRandom:
      return "random";
  }
  return "kl";
}

std::string to_string(StepMode v) { return v == StepMode::kPlanner ? "planner" : "random"; }

std::string to_string(BudgetMode v) { return v == BudgetMode::kScheduled ? "scheduled" : "deviation_only"; }

std::optional<std::string> AttackConfig::validate(int n_agents) const {
  if (k_wp < 0 || t_wp < 0) throw ConfigError("attack: K_WP and t_WP must be non-negative");
  if (m < 0) throw ConfigError("attack: m must be non-negative");
  if (m > n_agents - 1) {
    throw ConfigError("attack: m = " + std::to_string(m) + " exceeds n - 1 = " + std::to_string(n_agents - 1));
  }
  if (!(alpha_virtual >= 0)) throw ConfigError("attack: alpha_virtual must be >= 0");
  if (!(kl_temperature > 0)) throw ConfigError("attack: kl_temperature must be > 0");
  if (m >= (n_agents - 1) / 2) {
    return "attack: m = " + std::to_string(m) + " is not below floor((n-1)/2) = " + std::to_string((n_agents - 1) / 2);
  }
  return std::nullopt;
}

}  // namespace wolfpack::attack
