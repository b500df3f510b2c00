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

#include "wolfpack/env/mpe.hpp"

#include <string>

#include "wolfpack/errors.hpp"

namespace wolfpack::env {
namespace {

Vec2 direction(int action) {
  switch (action) {
    case kUp:
      return {0.0, 1.0};
    case kDown:
      return {0.0, -1.0};
    case kLeft:
      return {-1.0, 0.0};
    case kRight:
      return {1.0, 0.0};
    default:
      return {0.0, 0.0};
  }
}

void integrate(Vec2& pos, Vec2& vel, int action, double accel, double max_speed, const Physics& ph) {
  vel = vel * (1.0 - ph.damping) + direction(action) * (accel * ph.dt);
  const double speed = vel.norm();
  if (speed > max_speed) vel *= max_speed / speed;
  pos += vel * ph.dt;
}

}  // namespace

void ScenarioSpec::validate() const {
  if (n_predators < 1) throw ConfigError("scenario: n_predators must be >= 1");
  if (n_prey < 1) throw ConfigError("scenario: n_prey must be >= 1");
  if (n_landmarks < 0) throw ConfigError("scenario: n_landmarks must be >= 0");
  if (episode_limit < 1) throw ConfigError("scenario: episode_limit must be >= 1");
  const auto& p = physics;
  if (!(p.dt > 0) || !(p.damping >= 0 && p.damping <= 1) || !(p.predator_accel >= 0) || !(p.prey_accel >= 0) ||
      !(p.predator_max_speed > 0) || !(p.prey_max_speed > 0) || !(p.predator_radius > 0) ||
      !(p.prey_radius > 0)) {
    throw ConfigError("scenario: invalid physics constants");
  }
  if (!(reward_per_collision >= 0)) throw ConfigError("scenario: reward_per_collision must be >= 0");
}

ScenarioSpec ScenarioSpec::predator_prey(int predators, int prey) {
  ScenarioSpec s;
  s.n_predators = predators;
  s.n_prey = prey;
  return s;
}

PredatorPrey::PredatorPrey(ScenarioSpec spec) : spec_(std::move(spec)) { spec_.validate(); }

WorldState PredatorPrey::reset(std::uint64_t seed) const {
  std::seed_seq init_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x696e6974u};
  std::seed_seq prey_seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0x70726579u};
  std::mt19937_64 rng(init_seq);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  auto draw = [&](int count) {
    std::vector<Vec2> out(static_cast<std::size_t>(count));
    for (auto& p : out) {
      const double x = unit(rng);
      p = Vec2(x, unit(rng));
    }
    return out;
  };
  WorldState s;
  s.predator_pos = draw(spec_.n_predators);
  s.prey_pos = draw(spec_.n_prey);
  s.landmark_pos = draw(spec_.n_landmarks);
  s.predator_vel.assign(static_cast<std::size_t>(spec_.n_predators), Vec2::Zero());
  s.prey_vel.assign(static_cast<std::size_t>(spec_.n_prey), Vec2::Zero());
  s.t = 0;
  s.prey_rng.seed(prey_seq);
  return s;
}

StepResult PredatorPrey::step(WorldState& state, std::span<const int> joint_action) const {
  if (static_cast<int>(joint_action.size()) != spec_.n_predators) {
    throw ShapeError("step: expected one action per predator");
  }
  for (int a : joint_action) {
    if (a < 0 || a >= kNumActions) throw DomainError("step: action index " + std::to_string(a) + " out of range");
  }
  if (state.t >= spec_.episode_limit) throw DomainError("step: episode already finished");

  const auto& ph = spec_.physics;
  for (int g = 0; g < spec_.n_prey; ++g) {
    const int a = prey_policy(state, g, state.prey_rng);
    integrate(state.prey_pos[g], state.prey_vel[g], a, ph.prey_accel, ph.prey_max_speed, ph);
  }
  for (int i = 0; i < spec_.n_predators; ++i) {
    integrate(state.predator_pos[i], state.predator_vel[i], joint_action[i], ph.predator_accel,
              ph.predator_max_speed, ph);
  }
  ++state.t;
  return {reward(state), state.t == spec_.episode_limit};
}

double PredatorPrey::reward(const WorldState& state) const {
  const double contact = spec_.physics.predator_radius + spec_.physics.prey_radius;
  int hits = 0;
  for (const auto& g : state.prey_pos) {
    for (const auto& p : state.predator_pos) {
      if ((g - p).norm() < contact) ++hits;
    }
  }
  return spec_.reward_per_collision * hits;
}

Eigen::VectorXd PredatorPrey::observation(const WorldState& state, int agent) const {
  Eigen::VectorXd o(obs_dim());
  const Vec2& self = state.predator_pos[agent];
  Eigen::Index k = 0;
  auto put = [&](const Vec2& v) {
    o.segment<2>(k) = v;
    k += 2;
  };
  put(state.predator_vel[agent]);
  put(self);
  for (const auto& l : state.landmark_pos) put(l - self);
  for (int j = 0; j < spec_.n_predators; ++j) {
    if (j != agent) put(state.predator_pos[j] - self);
  }
  for (const auto& g : state.prey_pos) put(g - self);
  for (const auto& v : state.prey_vel) put(v);
  return o;
}

Eigen::MatrixXd PredatorPrey::joint_observations(const WorldState& state) const {
  Eigen::MatrixXd obs(spec_.n_predators, obs_dim());
  for (int i = 0; i < spec_.n_predators; ++i) obs.row(i) = observation(state, i).transpose();
  return obs;
}

Eigen::VectorXd PredatorPrey::global_state(const WorldState& state) const {
  Eigen::VectorXd s(state_dim());
  for (int i = 0; i < spec_.n_predators; ++i) s.segment(i * obs_dim(), obs_dim()) = observation(state, i);
  return s;
}

int prey_policy(const WorldState& /*state*/, int /*prey_id*/, std::mt19937_64& rng) {
  return std::uniform_int_distribution<int>(0, kNumActions - 1)(rng);
}

}  // namespace wolfpack::env
