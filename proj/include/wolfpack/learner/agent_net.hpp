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

#include "wolfpack/core.hpp"

namespace wolfpack::learner {

struct AgentNetConfig {
  int obs_dim = 0;
  int n_agents = 1;
  int n_actions = 5;
  int hidden = 64;
  bool last_action_onehot = true;
  bool agent_id_onehot = true;

  int input_width() const {
    return obs_dim + (last_action_onehot ? n_actions : 0) + (agent_id_onehot ? n_agents : 0);
  }
};

// Per-agent action values and advanced recurrent state for one time step.
struct QOutput {
  Eigen::MatrixXd q;       // n x n_actions
  Eigen::MatrixXd hidden;  // n x hidden

  // Throws TrainingError when any value is non-finite or exceeds `bound`.
  void check(double bound = 1e6) const;
};

// Shared recurrent Q network: FC -> ReLU -> GRU -> FC. Parameters live
// under "agent.*" in the store.
class AgentNet {
 public:
  explicit AgentNet(AgentNetConfig config);

  const AgentNetConfig& config() const { return config_; }

  template <typename Rng>
  void init(ParamStore& store, Rng& rng) const {
    tensor::init_dense(store, "agent.fc1", config_.input_width(), config_.hidden, rng);
    tensor::init_gru(store, "agent.gru", config_.hidden, config_.hidden, rng);
    tensor::init_dense(store, "agent.fc2", config_.hidden, config_.n_actions, rng);
  }

  struct Vars {
    tensor::DenseVars<double> fc1;
    tensor::GruVars<double> gru;
    tensor::DenseVars<double> fc2;
  };

  template <typename Store>
  Vars bind(Tape& tape, Store& store) const {
    return {tensor::bind_dense(tape, store, "agent.fc1"), tensor::bind_gru(tape, store, "agent.gru"),
            tensor::bind_dense(tape, store, "agent.fc2")};
  }

  struct StepVars {
    Var q;
    Var hidden;
  };

  // inputs: rows x input_width, hidden: rows x hidden.
  StepVars step(const Vars& p, const Var& inputs, const Var& hidden) const;

  // Builds network inputs. `last_actions[r] < 0` means "no previous action".
  Eigen::MatrixXd build_inputs(const Eigen::MatrixXd& obs, std::span<const int> last_actions,
                               std::span<const int> agent_ids) const;

  // One decentralized step for all n agents (row i is agent i).
  QOutput agent_q(const ParamStore& store, const Eigen::MatrixXd& obs, std::span<const int> last_actions,
                  const Eigen::MatrixXd& hidden) const;

  Eigen::MatrixXd initial_hidden(int rows) const { return Eigen::MatrixXd::Zero(rows, config_.hidden); }

 private:
  AgentNetConfig config_;
};

}  // namespace wolfpack::learner
