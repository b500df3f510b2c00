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

#include <string>
#include <vector>

namespace wolfpack {

// One attacked step of an episode.
struct AttackLogEntry {
  int step = 0;
  std::vector<int> targets;
  double delta_q = 0;
  int window_id = -1;
  std::string kind;  // "initial", "followup" or "random"
};

// One episode as stored in the replay buffer. The global state is the
// concatenation of the agents' observations, so observations are views into
// `states` rather than a second copy.
struct EpisodeRecord {
  int n_agents = 0;
  int obs_dim = 0;
  Eigen::MatrixXd states;            // (T+1) x state_dim, includes the final state
  Eigen::MatrixXi actions;           // T x n, executed (possibly attacked)
  Eigen::MatrixXi original_actions;  // T x n, chosen by the policy
  Eigen::MatrixXi attacked;          // T x n, 1 where the attacker targeted the agent
  Eigen::VectorXd rewards;           // T
  Eigen::VectorXi done;              // T
  double episode_return = 0;
  std::vector<AttackLogEntry> attack_log;

  int length() const { return static_cast<int>(rewards.size()); }

  // n x obs_dim observations at step t (0 <= t <= length()).
  Eigen::MatrixXd observations(int t) const {
    Eigen::MatrixXd o(n_agents, obs_dim);
    for (int i = 0; i < n_agents; ++i) o.row(i) = states.row(t).segment(i * obs_dim, obs_dim);
    return o;
  }

  int attacked_steps() const {
    int n = 0;
    for (Eigen::Index t = 0; t < attacked.rows(); ++t) n += attacked.row(t).any() ? 1 : 0;
    return n;
  }
};

}  // namespace wolfpack
