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

#include "wolfpack/planner/rollout.hpp"

#include <algorithm>

#include "wolfpack/errors.hpp"
#include "wolfpack/learner/control.hpp"

namespace wolfpack::planner {
namespace {

Eigen::MatrixXd unflatten(const Eigen::VectorXd& flat, int n, int d) {
  Eigen::MatrixXd o(n, d);
  for (int i = 0; i < n; ++i) o.row(i) = flat.segment(static_cast<Eigen::Index>(i) * d, d).transpose();
  return o;
}

template <typename M>
M append_row(const M& m, const Eigen::Ref<const Eigen::Matrix<typename M::Scalar, 1, Eigen::Dynamic>>& row,
             Eigen::Index keep) {
  const Eigen::Index rows = std::min(m.rows() + 1, keep);
  M out(rows, row.size());
  out.topRows(rows - 1) = m.bottomRows(rows - 1);
  out.row(rows - 1) = row;
  return out;
}

}  // namespace

RolloutStart RolloutStart::from_history(const Eigen::MatrixXd& states, const Eigen::MatrixXi& actions,
                                        const Eigen::MatrixXd& hidden, int window, int steps_left) {
  const auto k = states.rows();
  if (k < 1) throw DomainError("rollout: history needs at least one state");
  if (actions.rows() != k - 1) throw ShapeError("rollout: one executed action per past state");
  const auto keep = std::min<Eigen::Index>(k, window);
  RolloutStart s;
  s.states = states.bottomRows(keep);
  s.actions = actions.bottomRows(keep - 1);
  s.hidden = hidden;
  s.last_action.assign(static_cast<std::size_t>(hidden.rows()), -1);
  if (k > 1) {
    for (Eigen::Index i = 0; i < actions.cols(); ++i) s.last_action[i] = actions(k - 2, i);
  }
  s.steps_left = steps_left;
  return s;
}

PlannerDynamics::PlannerDynamics(const PlanningModel& model, const ParamStore& params, const RolloutStart& start,
                                 int n_agents, int obs_dim)
    : model_(model),
      params_(params),
      n_agents_(n_agents),
      obs_dim_(obs_dim),
      states_(start.states),
      obs_(start.states.leftCols(static_cast<Eigen::Index>(n_agents) * obs_dim)),
      actions_(start.actions) {
  if (states_.rows() < 1) throw DomainError("planner dynamics: empty history");
}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> PlannerDynamics::advance(std::span<const int> executed) {
  Eigen::RowVectorXi a(n_agents_);
  for (int i = 0; i < n_agents_; ++i) a(i) = executed[i];
  Eigen::MatrixXi acts(states_.rows(), n_agents_);
  acts.topRows(states_.rows() - 1) = actions_;
  acts.row(states_.rows() - 1) = a;
  auto [s, o] = model_.predict(params_, states_, obs_, acts);
  const int W = model_.config().window;
  actions_ = acts.bottomRows(std::min<Eigen::Index>(acts.rows(), W - 1));
  states_ = append_row(states_, s.transpose(), W);
  obs_ = append_row(obs_, o.transpose(), W);
  return {s, unflatten(o, n_agents_, obs_dim_)};
}

OracleDynamics::OracleDynamics(const env::PredatorPrey& env, const env::WorldState& state)
    : env_(env), state_(env::clone(state)) {}

std::pair<Eigen::VectorXd, Eigen::MatrixXd> OracleDynamics::advance(std::span<const int> executed) {
  env_.step(state_, executed);
  return {env_.global_state(state_), env_.joint_observations(state_)};
}

RolloutResult rollout_delta_qwp(const RolloutPolicy& policy, const attack::AttackConfig& config,
                                const RolloutStart& start, Dynamics& dynamics, std::mt19937_64& rng) {
  const auto& ac = policy.agent.config();
  const int n = ac.n_agents;
  if (start.states.rows() < 1 || start.steps_left < 1) throw DomainError("rollout: needs at least one real step");
  Eigen::VectorXd state = start.states.bottomRows(1).transpose();
  Eigen::MatrixXd obs = unflatten(state.head(static_cast<Eigen::Index>(n) * ac.obs_dim), n, ac.obs_dim);
  Eigen::MatrixXd hidden = start.hidden;
  std::vector<int> last = start.last_action;
  const int horizon = std::min(config.t_wp, start.steps_left - 1);

  RolloutResult result;
  std::vector<int> a(static_cast<std::size_t>(n));
  for (int l = 0; l <= horizon; ++l) {
    const auto out = policy.agent.agent_q(policy.params, obs, last, hidden);
    for (int j = 0; j < n; ++j) a[j] = learner::argmax(out.q.row(j).transpose());
    const attack::QContext ctx{policy.mixer, policy.params, out.q, state};
    auto at = a;
    if (l == 0) {
      const int i = attack::init_agent(config.init, ctx, a, rng);
      at[i] = attack::min_qtot_action(ctx, i, a);
      result.initial = i;
      switch (config.followup) {
        case attack::FollowupMode::kKl:
          result.followup = attack::followup_select_kl(out.q, attack::virtual_update(ctx, a, at, config.alpha_virtual),
                                                       i, config.m, config.kl_temperature);
          break;
        case attack::FollowupMode::kL2:
          result.followup = attack::followup_select_l2(obs, i, config.m);
          break;
        case attack::FollowupMode::kRandom:
          result.followup = attack::followup_select_random(n, i, config.m, rng);
          break;
      }
    } else {
      for (int j : result.followup) at[j] = attack::min_qtot_action(ctx, j, a);
    }
    const double dq = attack::delta_q_tot(ctx, a, at);
    result.per_step.push_back(dq);
    result.delta_q_wp += dq;
    if (l < horizon) {
      std::tie(state, obs) = dynamics.advance(at);
      hidden = out.hidden;
      last = at;
    }
  }
  return result;
}

double plan_delta_qwp(const RolloutPolicy& policy, const attack::AttackConfig& config, const RolloutStart& start,
                      const PlanningModel& model, const ParamStore& planner_params, std::mt19937_64& rng) {
  PlannerDynamics dyn(model, planner_params, start, policy.agent.config().n_agents, policy.agent.config().obs_dim);
  return rollout_delta_qwp(policy, config, start, dyn, rng).delta_q_wp;
}

double oracle_delta_qwp(const RolloutPolicy& policy, const attack::AttackConfig& config, const RolloutStart& start,
                        const env::PredatorPrey& env, const env::WorldState& state, std::mt19937_64& rng) {
  OracleDynamics dyn(env, state);
  return rollout_delta_qwp(policy, config, start, dyn, rng).delta_q_wp;
}

}  // namespace wolfpack::planner
