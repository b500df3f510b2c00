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

#include "wolfpack/attack/config.hpp"
#include "wolfpack/env/mpe.hpp"
#include "wolfpack/learner/mixer.hpp"
#include "wolfpack/planner/models.hpp"

namespace wolfpack::harness {

struct TrainConfig {
  long total_steps = 300000;
  long pretrain_steps = 100000;
  double lr = 5e-4;
  double rms_alpha = 0.99;
  double rms_eps = 1e-5;
  double gamma = 0.99;
  int buffer_episodes = 5000;
  int batch_size = 32;
  int train_interval_episodes = 1;
  int updates_per_train = 1;  // TD steps each time training runs
  double epsilon_start = 1.0;
  double epsilon_finish = 0.05;
  long epsilon_anneal_steps = 50000;
  double ema_rate = 0.005;
  bool hard_target = false;       // copy every hard_update_interval updates instead of EMA
  int hard_update_interval = 200;
  double grad_clip = 10.0;
  int hidden = 64;
  bool double_q = true;
  long checkpoint_interval = 0;  // env steps, 0 = phase ends only
  int log_interval_episodes = 10;
};

struct PlannerSettings {
  planner::PlannerConfig model;
  int batch_size = 32;
  double lr = 5e-4;
  bool oracle_labels = false;  // label with exact rollouts instead of the planning model
  bool train_during_pretrain = true;
};

struct EvalConfig {
  int episodes = 100;
  std::vector<std::string> attackers{"natural", "random", "wolfpack"};
  int k = 4;
  double epsilon = 0.0;
  int jobs = 1;
  std::string attacker_checkpoint;
};

struct RunConfig {
  env::ScenarioSpec scenario;
  learner::MixerConfig mixer;
  attack::AttackConfig attack;
  TrainConfig train;
  PlannerSettings planner;
  EvalConfig eval;
  std::vector<std::uint64_t> seeds{1, 2, 3};

  // Throws ConfigError when infeasible; returns non-fatal warnings.
  std::vector<std::string> validate() const;
};

// Missing keys keep their defaults; unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const RunConfig& config);
RunConfig load_config(const std::string& path);

}  // namespace wolfpack::harness
