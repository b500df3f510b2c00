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

#include "wolfpack/learner/agent_net.hpp"

#include <numeric>
#include <string>

#include "wolfpack/errors.hpp"

namespace wolfpack::learner {

void QOutput::check(double bound) const {
  if (!q.allFinite() || !hidden.allFinite()) throw TrainingError("agent network produced non-finite values");
  if (q.size() > 0 && q.cwiseAbs().maxCoeff() > bound) {
    throw TrainingError("agent Q-value magnitude exceeds sanity bound " + std::to_string(bound));
  }
}

AgentNet::AgentNet(AgentNetConfig config) : config_(config) {
  if (config_.obs_dim <= 0 || config_.n_agents <= 0 || config_.n_actions <= 0 || config_.hidden <= 0) {
    throw ConfigError("agent net: dimensions must be positive");
  }
}

AgentNet::StepVars AgentNet::step(const Vars& p, const Var& inputs, const Var& hidden) const {
  if (inputs.cols() != config_.input_width()) throw ShapeError("agent net: input width mismatch");
  if (hidden.cols() != config_.hidden || hidden.rows() != inputs.rows()) {
    throw ShapeError("agent net: hidden state shape mismatch");
  }
  auto x = tensor::dense(inputs, p.fc1, tensor::Activation::kRelu);
  auto h = tensor::gru_step(x, hidden, p.gru);
  return {tensor::dense(h, p.fc2), h};
}

Eigen::MatrixXd AgentNet::build_inputs(const Eigen::MatrixXd& obs, std::span<const int> last_actions,
                                       std::span<const int> agent_ids) const {
  const auto rows = obs.rows();
  if (obs.cols() != config_.obs_dim) throw ShapeError("agent net: observation width mismatch");
  if (static_cast<Eigen::Index>(last_actions.size()) != rows || static_cast<Eigen::Index>(agent_ids.size()) != rows) {
    throw ShapeError("agent net: one last action and agent id per row");
  }
  Eigen::MatrixXd in = Eigen::MatrixXd::Zero(rows, config_.input_width());
  in.leftCols(config_.obs_dim) = obs;
  Eigen::Index off = config_.obs_dim;
  if (config_.last_action_onehot) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const int a = last_actions[r];
      if (a >= config_.n_actions) throw DomainError("agent net: last action out of range");
      if (a >= 0) in(r, off + a) = 1.0;
    }
    off += config_.n_actions;
  }
  if (config_.agent_id_onehot) {
    for (Eigen::Index r = 0; r < rows; ++r) {
      const int id = agent_ids[r];
      if (id < 0 || id >= config_.n_agents) throw DomainError("agent net: agent id out of range");
      in(r, off + id) = 1.0;
    }
  }
  return in;
}

QOutput AgentNet::agent_q(const ParamStore& store, const Eigen::MatrixXd& obs, std::span<const int> last_actions,
                          const Eigen::MatrixXd& hidden) const {
  std::vector<int> ids(static_cast<std::size_t>(obs.rows()));
  std::iota(ids.begin(), ids.end(), 0);
  Tape tape(false);
  const auto vars = bind(tape, store);
  auto out = step(vars, tape.constant(build_inputs(obs, last_actions, ids)), tape.constant(hidden));
  return {out.q.value(), out.hidden.value()};
}

}  // namespace wolfpack::learner
