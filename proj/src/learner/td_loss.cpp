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

#include "wolfpack/learner/td_loss.hpp"

#include <algorithm>

#include "wolfpack/errors.hpp"
#include "wolfpack/learner/control.hpp"

namespace wolfpack::learner {
namespace {

struct Unroll {
  std::vector<Var> q;  // per t, (B*n) x A
};

// Agent network unrolled over t = 0..T for every (episode, agent) row.
template <typename Store>
Unroll unroll(Tape& tape, const std::vector<const EpisodeRecord*>& batch, const AgentNet& agent, Store& store,
              int T) {
  const int B = static_cast<int>(batch.size());
  const int n = agent.config().n_agents;
  const int d = agent.config().obs_dim;
  const auto vars = agent.bind(tape, store);
  std::vector<int> ids(static_cast<std::size_t>(B * n));
  for (int r = 0; r < B * n; ++r) ids[r] = r % n;
  Var hidden = tape.constant(agent.initial_hidden(B * n));
  Unroll out;
  std::vector<int> last(static_cast<std::size_t>(B * n));
  for (int t = 0; t <= T; ++t) {
    Eigen::MatrixXd obs = Eigen::MatrixXd::Zero(B * n, d);
    for (int b = 0; b < B; ++b) {
      const auto* ep = batch[b];
      const int len = ep->length();
      for (int i = 0; i < n; ++i) {
        const int r = b * n + i;
        if (t <= len) obs.row(r) = ep->states.row(t).segment(i * d, d);
        last[r] = (t > 0 && t - 1 < len) ? ep->actions(t - 1, i) : -1;
      }
    }
    auto step = agent.step(vars, tape.constant(agent.build_inputs(obs, last, ids)), hidden);
    out.q.push_back(step.q);
    hidden = step.hidden;
  }
  return out;
}

}  // namespace

Var td_loss_graph(Tape& tape, const std::vector<const EpisodeRecord*>& batch, const AgentNet& agent,
                  const Mixer& mixer, ParamStore& online, const ParamStore& target, const TdConfig& config,
                  TdStats* stats) {
  if (batch.empty()) throw DomainError("td_loss: empty batch");
  const int B = static_cast<int>(batch.size());
  const int n = agent.config().n_agents;
  const int S = mixer.config().state_dim;
  int T = 0;
  for (const auto* ep : batch) {
    if (ep->n_agents != n || ep->states.cols() != S) throw ShapeError("td_loss: episode shape mismatch");
    T = std::max(T, ep->length());
  }
  if (T == 0) throw DomainError("td_loss: episodes have no transitions");

  auto on = unroll(tape, batch, agent, online, T);
  Tape frozen(false);
  auto tgt = unroll(frozen, batch, agent, target, T);

  std::vector<Var> taken;
  Eigen::MatrixXd states = Eigen::MatrixXd::Zero(T * B, S);
  Eigen::MatrixXd next_states = Eigen::MatrixXd::Zero(T * B, S);
  Eigen::MatrixXd next_q = Eigen::MatrixXd::Zero(T * B, n);
  Eigen::VectorXd rewards = Eigen::VectorXd::Zero(T * B);
  Eigen::VectorXd not_done = Eigen::VectorXd::Zero(T * B);
  Eigen::VectorXd mask = Eigen::VectorXd::Zero(T * B);
  std::vector<Eigen::Index> cols(static_cast<std::size_t>(B * n));
  for (int t = 0; t < T; ++t) {
    const auto& q_next_online = on.q[t + 1].value();
    const auto& q_next_target = tgt.q[t + 1].value();
    for (int b = 0; b < B; ++b) {
      const auto* ep = batch[b];
      const int row = t * B + b;
      const bool valid = t < ep->length();
      for (int i = 0; i < n; ++i) {
        const int r = b * n + i;
        cols[r] = valid ? ep->actions(t, i) : 0;
        if (!valid) continue;
        const int a_next = config.double_q ? argmax(q_next_online.row(r).transpose())
                                           : argmax(q_next_target.row(r).transpose());
        next_q(row, i) = q_next_target(r, a_next);
      }
      if (!valid) continue;
      states.row(row) = ep->states.row(t);
      next_states.row(row) = ep->states.row(t + 1);
      rewards(row) = ep->rewards(t);
      not_done(row) = ep->done(t) != 0 ? 0.0 : 1.0;
      mask(row) = 1.0;
    }
    taken.push_back(tensor::reshape(tensor::pick_cols(on.q[t], cols), B, n));
  }

  auto q_tot = mixer.forward(mixer.bind(tape, online), tensor::concat_rows(taken), tape.constant(states));
  const auto frozen_mixer = mixer.bind(frozen, target);
  Eigen::VectorXd target_tot =
      mixer.forward(frozen_mixer, frozen.constant(next_q), frozen.constant(next_states)).value().col(0);
  Eigen::MatrixXd y = rewards + config.gamma * not_done.cwiseProduct(target_tot);

  const double count = mask.sum();
  auto loss = tensor::weighted_sse(q_tot, y, mask, count);
  if (stats != nullptr) {
    stats->loss = loss.value()(0, 0);
    stats->mean_q_tot = q_tot.value().col(0).cwiseProduct(mask).sum() / count;
    stats->mean_target = y.col(0).cwiseProduct(mask).sum() / count;
    stats->transitions = static_cast<int>(count);
  }
  return loss;
}

TdStats td_loss(const std::vector<const EpisodeRecord*>& batch, const AgentNet& agent, const Mixer& mixer,
                ParamStore& online, const ParamStore& target, const TdConfig& config) {
  online.zero_grad();
  Tape tape;
  TdStats stats;
  auto loss = td_loss_graph(tape, batch, agent, mixer, online, target, config, &stats);
  tape.backward(loss);
  return stats;
}

}  // namespace wolfpack::learner
