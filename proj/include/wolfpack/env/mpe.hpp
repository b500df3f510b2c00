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
#include <span>
#include <vector>

namespace wolfpack::env {

using Vec2 = Eigen::Vector2d;

inline constexpr int kNumActions = 5;

// Discrete moves shared by predators and prey.
enum Action : int { kNoop = 0, kUp = 1, kDown = 2, kLeft = 3, kRight = 4 };

struct Physics {
  double dt = 0.1;
  double damping = 0.25;
  double predator_accel = 3.0;
  double prey_accel = 4.0;
  double predator_max_speed = 1.0;
  double prey_max_speed = 1.3;
  double predator_radius = 0.075;
  double prey_radius = 0.05;
};

struct ScenarioSpec {
  int n_predators = 3;
  int n_prey = 1;
  int n_landmarks = 2;
  int episode_limit = 50;
  Physics physics;
  double reward_per_collision = 10.0;
  std::uint64_t seed = 0;

  int obs_dim() const { return 4 + 2 * n_landmarks + 2 * (n_predators - 1) + 4 * n_prey; }
  int state_dim() const { return n_predators * obs_dim(); }

  // Throws ConfigError on non-positive counts or physics constants.
  void validate() const;

  // PP_<predators>/<prey> with default physics.
  static ScenarioSpec predator_prey(int predators, int prey);
};

struct WorldState {
  std::vector<Vec2> predator_pos;
  std::vector<Vec2> predator_vel;
  std::vector<Vec2> prey_pos;
  std::vector<Vec2> prey_vel;
  std::vector<Vec2> landmark_pos;
  int t = 0;
  // Prey-only stream, independent of the initialization draws.
  std::mt19937_64 prey_rng;

  bool operator==(const WorldState&) const = default;
};

struct StepResult {
  double reward = 0;
  bool done = false;
};

// Predator-prey particle world. Predators are the learning agents; prey
// follow a uniform random policy. The environment is stateless: all mutable
// data lives in WorldState, so copies are independent clones.
class PredatorPrey {
 public:
  explicit PredatorPrey(ScenarioSpec spec);

  const ScenarioSpec& spec() const { return spec_; }
  int n_agents() const { return spec_.n_predators; }
  int obs_dim() const { return spec_.obs_dim(); }
  int state_dim() const { return spec_.state_dim(); }

  // Entities uniform in the unit square, zero velocity, t = 0.
  WorldState reset(std::uint64_t seed) const;

  // Advances one step in place. Throws DomainError on a bad action index or
  // a step past the episode limit; ShapeError on a wrong action count.
  StepResult step(WorldState& state, std::span<const int> joint_action) const;

  double reward(const WorldState& state) const;

  // Own velocity, own position, landmark offsets, other-predator offsets,
  // prey offsets, prey velocities.
  Eigen::VectorXd observation(const WorldState& state, int agent) const;

  // n_agents x obs_dim, row i = observation(state, i).
  Eigen::MatrixXd joint_observations(const WorldState& state) const;

  // Concatenation of all agents' observations.
  Eigen::VectorXd global_state(const WorldState& state) const;

 private:
  ScenarioSpec spec_;
};

// Uniform draw over the five moves.
int prey_policy(const WorldState& state, int prey_id, std::mt19937_64& rng);

inline WorldState clone(const WorldState& state) { return state; }

}  // namespace wolfpack::env
