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

#include "wolfpack/attack/wolfpack.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wolfpack/errors.hpp"
#include "wolfpack/learner/control.hpp"
#include "wolfpack/tensor/softmax.hpp"

namespace wolfpack::attack {
namespace {

void check_joint(const QContext& ctx, std::span<const int> joint) {
  if (static_cast<int>(joint.size()) != ctx.n_agents()) throw ShapeError("attack: joint action size mismatch");
  for (int a : joint) {
    if (a < 0 || a >= ctx.n_actions()) throw DomainError("attack: action out of range");
  }
}

void check_group(int n, int i, int m) {
  if (i < 0 || i >= n) throw DomainError("attack: agent index out of range");
  if (m < 0 || m > n - 1) throw ConfigError("attack: follow-up size m must be in [0, n-1]");
}

std::vector<int> candidates(int n, int i) {
  std::vector<int> out;
  for (int j = 0; j < n; ++j) {
    if (j != i) out.push_back(j);
  }
  return out;
}

}  // namespace

Eigen::VectorXd chosen_values(const Eigen::MatrixXd& q, std::span<const int> joint) {
  Eigen::VectorXd v(q.rows());
  for (Eigen::Index j = 0; j < q.rows(); ++j) v(j) = q(j, joint[j]);
  return v;
}

double q_tot(const QContext& ctx, std::span<const int> joint) {
  check_joint(ctx, joint);
  return ctx.mixer.evaluate(ctx.params, chosen_values(ctx.q, joint), ctx.state);
}

int min_qtot_action(const QContext& ctx, int i, std::span<const int> joint) {
  check_joint(ctx, joint);
  if (i < 0 || i >= ctx.n_agents()) throw DomainError("attack: agent index out of range");
  const Eigen::VectorXd base = chosen_values(ctx.q, joint);
  Eigen::MatrixXd rows = base.transpose().replicate(ctx.n_actions(), 1);
  rows.col(i) = ctx.q.row(i).transpose();
  return learner::argmin(ctx.mixer.evaluate(ctx.params, rows, ctx.state));
}

double delta_q_tot(const QContext& ctx, std::span<const int> a, std::span<const int> a_tilde) {
  check_joint(ctx, a);
  check_joint(ctx, a_tilde);
  Eigen::MatrixXd rows(2, ctx.n_agents());
  rows.row(0) = chosen_values(ctx.q, a).transpose();
  rows.row(1) = chosen_values(ctx.q, a_tilde).transpose();
  const Eigen::VectorXd v = ctx.mixer.evaluate(ctx.params, rows, ctx.state);
  return v(0) - v(1);
}

Eigen::MatrixXd virtual_update(const QContext& ctx, std::span<const int> a, std::span<const int> a_tilde,
                               double alpha) {
  check_joint(ctx, a);
  check_joint(ctx, a_tilde);
  int differing = 0;
  for (int j = 0; j < ctx.n_agents(); ++j) differing += a[j] != a_tilde[j] ? 1 : 0;
  if (differing > 1) throw DomainError("virtual_update: attacked joint differs from the original at several agents");
  const Eigen::VectorXd g = ctx.mixer.grad_q(ctx.params, chosen_values(ctx.q, a_tilde), ctx.state);
  Eigen::MatrixXd out = ctx.q;
  for (int j = 0; j < ctx.n_agents(); ++j) out(j, a_tilde[j]) += alpha * g(j);
  return out;
}

double softmax_kl(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double temperature) {
  if (x.size() != y.size()) throw ShapeError("softmax_kl: size mismatch");
  const Eigen::VectorXd p = tensor::softmax(x, temperature);
  // log p_k - log q_k = -d_k + log sum_l p_l exp(d_l), with d = (y - x) / T.
  const Eigen::ArrayXd d = (y - x).array() / temperature;
  const double shift = std::log1p((p.array() * (d.exp() - 1.0)).sum());
  const double kl = -(p.array() * d).sum() + shift;
  return std::max(kl, 0.0);
}

std::vector<int> top_m(const Eigen::VectorXd& scores, int i, int m) {
  const int n = static_cast<int>(scores.size());
  check_group(n, i, m);
  auto idx = candidates(n, i);
  std::stable_sort(idx.begin(), idx.end(), [&](int u, int v) { return scores(u) > scores(v); });
  idx.resize(static_cast<std::size_t>(m));
  return idx;
}

std::vector<int> followup_select_kl(const Eigen::MatrixXd& q, const Eigen::MatrixXd& q_tilde, int i, int m,
                                    double temperature) {
  if (q.rows() != q_tilde.rows() || q.cols() != q_tilde.cols()) throw ShapeError("followup_select_kl: shape mismatch");
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(q.rows());
  for (Eigen::Index j = 0; j < q.rows(); ++j) {
    if (j != i) scores(j) = softmax_kl(q.row(j).transpose(), q_tilde.row(j).transpose(), temperature);
  }
  return top_m(scores, i, m);
}

std::vector<int> followup_select_l2(const Eigen::MatrixXd& obs, int i, int m) {
  const int n = static_cast<int>(obs.rows());
  check_group(n, i, m);
  Eigen::VectorXd neg_dist(n);
  for (int j = 0; j < n; ++j) neg_dist(j) = -(obs.row(j) - obs.row(i)).norm();
  return top_m(neg_dist, i, m);
}

std::vector<int> followup_select_random(int n_agents, int i, int m, std::mt19937_64& rng) {
  check_group(n_agents, i, m);
  auto pool = candidates(n_agents, i);
  std::vector<int> out;
  std::sample(pool.begin(), pool.end(), std::back_inserter(out), m, rng);
  return out;
}

int init_agent(InitMode mode, const QContext& ctx, std::span<const int> joint, std::mt19937_64& rng) {
  if (mode == InitMode::kUniform) {
    return std::uniform_int_distribution<int>(0, ctx.n_agents() - 1)(rng);
  }
  check_joint(ctx, joint);
  const Eigen::VectorXd base = chosen_values(ctx.q, joint);
  Eigen::VectorXd best(ctx.n_agents());
  for (int j = 0; j < ctx.n_agents(); ++j) {
    Eigen::MatrixXd rows = base.transpose().replicate(ctx.n_actions(), 1);
    rows.col(j) = ctx.q.row(j).transpose();
    best(j) = ctx.mixer.evaluate(ctx.params, rows, ctx.state).minCoeff();
  }
  return learner::argmin(best);
}

AttackSchedule AttackSchedule::start(const AttackConfig& config) {
  return start(config.total_budget(), config.k_wp);
}

AttackSchedule AttackSchedule::start(int k, int k_wp) {
  if (k < 0 || k_wp < 0) throw ConfigError("attack schedule: negative budget");
  AttackSchedule s;
  s.k_remaining = k;
  s.wolfpacks_remaining = k_wp;
  return s;
}

AttackStep wolfpack_act(int t, const QContext& ctx, const Eigen::MatrixXd& obs, std::span<const int> a,
                        AttackSchedule& schedule, const AttackConfig& config, bool fire, std::mt19937_64& rng) {
  check_joint(ctx, a);
  if (schedule.k_remaining < 0 || schedule.wolfpacks_remaining < 0) {
    throw InternalError("wolfpack_act: negative budget in schedule");
  }
  AttackStep out;
  out.actions.assign(a.begin(), a.end());

  auto charge = [&]() {
    const bool deviated = !std::equal(out.actions.begin(), out.actions.end(), a.begin());
    if (config.budget == BudgetMode::kScheduled || deviated) --schedule.k_remaining;
  };

  if (schedule.window) {
    auto& w = *schedule.window;
    if (w.steps_remaining <= 0 || t <= w.t_init || t > w.t_init + config.t_wp) {
      throw InternalError("wolfpack_act: window state inconsistent with step " + std::to_string(t));
    }
    if (schedule.k_remaining <= 0) {
      schedule.window.reset();
      return out;
    }
    for (int j : w.followup) out.actions[j] = min_qtot_action(ctx, j, a);
    out.targets = w.followup;
    out.delta_q = delta_q_tot(ctx, a, out.actions);
    charge();
    schedule.log.push_back({t, out.targets, out.delta_q, w.id, "followup"});
    if (--w.steps_remaining == 0) schedule.window.reset();
    return out;
  }

  if (!fire || !schedule.can_open()) return out;

  const int i = init_agent(config.init, ctx, a, rng);
  out.actions[i] = min_qtot_action(ctx, i, a);
  out.targets = {i};
  out.delta_q = delta_q_tot(ctx, a, out.actions);

  std::vector<int> group;
  switch (config.followup) {
    case FollowupMode::kKl:
      group = followup_select_kl(ctx.q, virtual_update(ctx, a, out.actions, config.alpha_virtual), i, config.m,
                                 config.kl_temperature);
      break;
    case FollowupMode::kL2:
      group = followup_select_l2(obs, i, config.m);
      break;
    case FollowupMode::kRandom:
      group = followup_select_random(ctx.n_agents(), i, config.m, rng);
      break;
  }

  const int id = schedule.windows_opened++;
  --schedule.wolfpacks_remaining;
  charge();
  schedule.log.push_back({t, out.targets, out.delta_q, id, "initial"});
  if (config.t_wp > 0 && config.m > 0) schedule.window = Window{t, i, std::move(group), config.t_wp, id};
  return out;
}

RandomAttacker::RandomAttacker(int k, int episode_limit, int n_agents, int n_actions, std::mt19937_64& rng)
    : n_agents_(n_agents), n_actions_(n_actions), k_remaining_(std::min(k, episode_limit)) {
  if (k < 0 || episode_limit <= 0 || n_agents <= 0 || n_actions < 2) {
    throw ConfigError("random attacker: invalid sizes");
  }
  std::vector<int> all(static_cast<std::size_t>(episode_limit));
  std::iota(all.begin(), all.end(), 0);
  std::sample(all.begin(), all.end(), std::back_inserter(steps_), k_remaining_, rng);
}

AttackStep RandomAttacker::act(int t, std::span<const int> a, std::mt19937_64& rng, const QContext* ctx) {
  if (static_cast<int>(a.size()) != n_agents_) throw ShapeError("random attacker: joint action size mismatch");
  AttackStep out;
  out.actions.assign(a.begin(), a.end());
  if (k_remaining_ <= 0 || !std::binary_search(steps_.begin(), steps_.end(), t)) return out;
  const int j = std::uniform_int_distribution<int>(0, n_agents_ - 1)(rng);
  int b = std::uniform_int_distribution<int>(0, n_actions_ - 2)(rng);
  if (b >= a[j]) ++b;
  out.actions[j] = b;
  out.targets = {j};
  if (ctx != nullptr) out.delta_q = delta_q_tot(*ctx, a, out.actions);
  --k_remaining_;
  log_.push_back({t, out.targets, out.delta_q, -1, "random"});
  return out;
}

}  // namespace wolfpack::attack
