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

#include <random>
#include <span>
#include <vector>

#include "wolfpack/attack/wolfpack.hpp"
#include "wolfpack/core.hpp"
#include "wolfpack/env/mpe.hpp"
#include "wolfpack/learner/agent_net.hpp"
#include "wolfpack/learner/mixer.hpp"
#include "wolfpack/planner/models.hpp"

namespace wolfpack::planner {

struct RolloutPolicy {
  const learner::AgentNet& agent;
  const learner::Mixer& mixer;
  const ParamStore& params;
};

// Live episode context at step t.
struct RolloutStart {
  Eigen::MatrixXd states;        // k x S, last row is s_t
  Eigen::MatrixXi actions;       // (k-1) x n executed actions preceding s_t
  Eigen::MatrixXd hidden;        // n x H agent hiddens before acting at t
  std::vector<int> last_action;  // executed at t-1, -1 at t = 0
  int steps_left = 1;            // steps t .. episode end

  // Keeps the last `window` states of the given history.
  static RolloutStart from_history(const Eigen::MatrixXd& states, const Eigen::MatrixXi& actions,
                                   const Eigen::MatrixXd& hidden, int window, int steps_left);
};

class Dynamics {
 public:
  virtual ~Dynamics() = default;
  // Applies the executed joint action and returns the next global state and
  // n x obs_dim observations.
  virtual std::pair<Eigen::VectorXd, Eigen::MatrixXd> advance(std::span<const int> executed) = 0;
};

// Learned dynamics, fed its own predictions.
class PlannerDynamics : public Dynamics {
 public:
  PlannerDynamics(const PlanningModel& model, const ParamStore& params, const RolloutStart& start, int n_agents,
                  int obs_dim);
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> advance(std::span<const int> executed) override;

 private:
  const PlanningModel& model_;
  const ParamStore& params_;
  int n_agents_;
  int obs_dim_;
  Eigen::MatrixXd states_;
  Eigen::MatrixXd obs_;
  Eigen::MatrixXi actions_;
};

// Exact dynamics on a private copy of the world.
class OracleDynamics : public Dynamics {
 public:
  OracleDynamics(const env::PredatorPrey& env, const env::WorldState& state);
  std::pair<Eigen::VectorXd, Eigen::MatrixXd> advance(std::span<const int> executed) override;

 private:
  const env::PredatorPrey& env_;
  env::WorldState state_;
};

struct RolloutResult {
  double delta_q_wp = 0;
  std::vector<double> per_step;
  int initial = -1;
  std::vector<int> followup;
};

// Greedy policy under a Wolfpack attack opened at t: initial agent at t,
// follow-up group for up to t_WP further steps (cut at the episode end).
RolloutResult rollout_delta_qwp(const RolloutPolicy& policy, const attack::AttackConfig& config,
                                const RolloutStart& start, Dynamics& dynamics, std::mt19937_64& rng);

double plan_delta_qwp(const RolloutPolicy& policy, const attack::AttackConfig& config, const RolloutStart& start,
                      const PlanningModel& model, const ParamStore& planner_params, std::mt19937_64& rng);

double oracle_delta_qwp(const RolloutPolicy& policy, const attack::AttackConfig& config, const RolloutStart& start,
                        const env::PredatorPrey& env, const env::WorldState& state, std::mt19937_64& rng);

}  // namespace wolfpack::planner
