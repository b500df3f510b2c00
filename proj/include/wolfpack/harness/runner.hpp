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

#include <Eigen/Core>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <json.hpp>

#include "wolfpack/attack/config.hpp"
#include "wolfpack/core.hpp"
#include "wolfpack/env/mpe.hpp"
#include "wolfpack/episode.hpp"
#include "wolfpack/harness/config.hpp"
#include "wolfpack/learner/agent_net.hpp"
#include "wolfpack/learner/mixer.hpp"
#include "wolfpack/planner/models.hpp"

namespace wolfpack::harness {

// Independent generators keyed from one run seed.
enum class Stream : std::uint32_t { kInit = 1, kEnv, kExplore, kAttacker, kPlanner, kBuffer };

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream, std::uint64_t index = 0);

struct Models {
  explicit Models(const RunConfig& config);

  RunConfig config;
  learner::AgentNet agent;
  learner::Mixer mixer;
  planner::PlanningModel planning;
  planner::QdiffModel qdiff;
  ParamStore params;  // agent and mixer
  ParamStore planning_params;
  ParamStore qdiff_params;

  void init(std::uint64_t seed);
};

nlohmann::json checkpoint_meta(const Models& models, std::uint64_t seed, const std::string& phase, long env_steps,
                               long episodes);
void save_models(const std::string& path, const Models& models, const nlohmann::json& meta);

// Rebuilds models from the embedded config. Throws LoadError on a corrupt or
// mismatched file.
Models load_models(const std::string& path, nlohmann::json* meta = nullptr);

// Throws ShapeError when the models were built for different dimensions.
void require_compatible(const Models& models, const env::ScenarioSpec& scenario);

enum class AttackerKind { kNatural, kRandom, kWolfpack };
AttackerKind parse_attacker(const std::string& s);
std::string to_string(AttackerKind kind);

struct EpisodeOptions {
  double epsilon = 0;
  AttackerKind attacker = AttackerKind::kNatural;
  attack::AttackConfig attack;
  int k = 0;     // attacked-step budget
  int k_wp = 0;  // wolfpack budget, wolfpack attacker only
  bool keep_hiddens = false;
  bool keep_worlds = false;
  bool trace_step_probs = false;
};

struct StepProb {
  int t = 0;
  double p = 0;
  bool fired = false;
  bool forced = false;
  Eigen::VectorXd forecast;
};

struct EpisodeOutput {
  EpisodeRecord record;
  std::vector<Eigen::MatrixXd> hiddens;  // agent hiddens before acting at t
  std::vector<env::WorldState> worlds;   // world before acting at t
  std::vector<StepProb> step_probs;
};

struct EpisodeRngs {
  std::mt19937_64 explore;
  std::mt19937_64 attacker;
  std::mt19937_64 planner;
};

// One episode of the victim policy. The attacker reads `attacker_models`
// (usually the victim itself).
EpisodeOutput run_episode(const env::PredatorPrey& env, const Models& victim, const Models& attacker_models,
                          const EpisodeOptions& options, std::uint64_t env_seed, EpisodeRngs& rngs);

// Per-step wolfpack damage targets: entry t is the value-gap sum of a window
// opened at t, rolled out through the planning model (or the simulator when
// `oracle`). Needs hiddens, and worlds for the oracle.
Eigen::VectorXd compute_labels(const env::PredatorPrey& env, const Models& models,
                               const attack::AttackConfig& config, const EpisodeOutput& episode, bool oracle,
                               std::mt19937_64& rng);

}  // namespace wolfpack::harness
