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

#include <optional>
#include <random>
#include <span>
#include <vector>

#include "wolfpack/attack/config.hpp"
#include "wolfpack/core.hpp"
#include "wolfpack/episode.hpp"
#include "wolfpack/learner/mixer.hpp"

namespace wolfpack::attack {

// Everything the attacker reads at one step. References must outlive it.
struct QContext {
  const learner::Mixer& mixer;
  const ParamStore& params;
  const Eigen::MatrixXd& q;      // n x n_actions
  const Eigen::VectorXd& state;  // global state

  int n_agents() const { return static_cast<int>(q.rows()); }
  int n_actions() const { return static_cast<int>(q.cols()); }
};

// Per-agent values of the given joint action.
Eigen::VectorXd chosen_values(const Eigen::MatrixXd& q, std::span<const int> joint);

double q_tot(const QContext& ctx, std::span<const int> joint);

// argmin over agent i's actions of Q^tot with the others fixed at `joint`.
int min_qtot_action(const QContext& ctx, int i, std::span<const int> joint);

// Q^tot(s, a) - Q^tot(s, a_tilde).
double delta_q_tot(const QContext& ctx, std::span<const int> a, std::span<const int> a_tilde);

// Q-values after one virtual ascent step on Q^tot(s, a_tilde): entry
// (j, a_tilde[j]) moves by alpha * dQ^tot/dQ^j.
Eigen::MatrixXd virtual_update(const QContext& ctx, std::span<const int> a, std::span<const int> a_tilde,
                               double alpha);

// KL(softmax(x / T) || softmax(y / T)).
double softmax_kl(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double temperature = 1.0);

// Indices j != i of the m largest scores; ties go to the lower index.
std::vector<int> top_m(const Eigen::VectorXd& scores, int i, int m);

std::vector<int> followup_select_kl(const Eigen::MatrixXd& q, const Eigen::MatrixXd& q_tilde, int i, int m,
                                    double temperature = 1.0);
std::vector<int> followup_select_l2(const Eigen::MatrixXd& obs, int i, int m);
std::vector<int> followup_select_random(int n_agents, int i, int m, std::mt19937_64& rng);

int init_agent(InitMode mode, const QContext& ctx, std::span<const int> joint, std::mt19937_64& rng);

struct Window {
  int t_init = 0;
  int initial = 0;
  std::vector<int> followup;
  int steps_remaining = 0;
  int id = 0;
};

struct AttackSchedule {
  int k_remaining = 0;
  int wolfpacks_remaining = 0;
  std::optional<Window> window;
  int windows_opened = 0;
  std::vector<AttackLogEntry> log;

  static AttackSchedule start(const AttackConfig& config);
  static AttackSchedule start(int k, int k_wp);

  bool can_open() const { return !window && wolfpacks_remaining > 0 && k_remaining > 0; }
};

struct AttackStep {
  std::vector<int> actions;  // executed joint action
  std::vector<int> targets;  // agents the attacker acted on
  double delta_q = 0;
  bool attacked() const { return !targets.empty(); }
};

// One step of the Wolfpack adversary. `fire` asks to open a window at t
// (ignored while a window is active or without budget). `obs` (n x obs_dim)
// is used by the L2 follow-up mode.
AttackStep wolfpack_act(int t, const QContext& ctx, const Eigen::MatrixXd& obs, std::span<const int> a,
                        AttackSchedule& schedule, const AttackConfig& config, bool fire, std::mt19937_64& rng);

// Attacks K uniformly drawn steps; at each, one uniform agent gets a uniform
// non-original action.
class RandomAttacker {
 public:
  RandomAttacker(int k, int episode_limit, int n_agents, int n_actions, std::mt19937_64& rng);

  // `ctx` is only used to log the value gap and may be null.
  AttackStep act(int t, std::span<const int> a, std::mt19937_64& rng, const QContext* ctx = nullptr);

  const std::vector<int>& steps() const { return steps_; }
  int k_remaining() const { return k_remaining_; }
  const std::vector<AttackLogEntry>& log() const { return log_; }

 private:
  int n_agents_;
  int n_actions_;
  int k_remaining_;
  std::vector<int> steps_;  // sorted
  std::vector<AttackLogEntry> log_;
};

}  // namespace wolfpack::attack
