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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "wolfpack/env/mpe.hpp"
#include "wolfpack/errors.hpp"

using namespace wolfpack;
using namespace wolfpack::env;

namespace {

// Places every entity far from every other one.
WorldState spread_state(const ScenarioSpec& spec) {
  PredatorPrey env(spec);
  WorldState s = env.reset(1);
  double x = 0;
  for (auto& p : s.predator_pos) p = Vec2(x += 1.0, 0.0);
  for (auto& p : s.prey_pos) p = Vec2(x += 1.0, 5.0);
  return s;
}

// Independent evaluation of the collision indicator sum.
double collisions(const ScenarioSpec& spec, const WorldState& s) {
  double r = 0;
  for (const auto& g : s.prey_pos) {
    for (const auto& p : s.predator_pos) {
      const double dx = g.x() - p.x(), dy = g.y() - p.y();
      if (std::sqrt(dx * dx + dy * dy) < spec.physics.prey_radius + spec.physics.predator_radius) r += 1;
    }
  }
  return r * spec.reward_per_collision;
}

}  // namespace

TEST_CASE("scenario dimensions match the predator-prey table") {
  const std::array<std::array<int, 4>, 3> table{{{3, 1, 16, 48}, {6, 2, 26, 156}, {9, 3, 36, 324}}};
  for (const auto& row : table) {
    auto spec = ScenarioSpec::predator_prey(row[0], row[1]);
    CHECK(spec.obs_dim() == row[2]);
    CHECK(spec.state_dim() == row[3]);
    PredatorPrey env(spec);
    auto s = env.reset(7);
    CHECK(static_cast<int>(s.predator_pos.size()) == row[0]);
    CHECK(static_cast<int>(s.prey_pos.size()) == row[1]);
    CHECK(s.landmark_pos.size() == 2);
    auto obs = env.joint_observations(s);
    CHECK(obs.rows() == row[0]);
    CHECK(obs.cols() == row[2]);
    CHECK(env.global_state(s).size() == row[3]);
    CHECK(s.t == 0);
  }
}

TEST_CASE("reset is deterministic and places entities in the unit square") {
  PredatorPrey env(ScenarioSpec::predator_prey(6, 2));
  auto a = env.reset(42);
  auto b = env.reset(42);
  CHECK(a == b);
  CHECK_FALSE(a == env.reset(43));
  for (const auto* group : {&a.predator_pos, &a.prey_pos, &a.landmark_pos}) {
    for (const auto& p : *group) {
      CHECK(p.minCoeff() >= 0.0);
      CHECK(p.maxCoeff() < 1.0);
    }
  }
}

TEST_CASE("invalid scenarios are configuration errors") {
  auto spec = ScenarioSpec::predator_prey(0, 1);
  CHECK_THROWS_AS(PredatorPrey{spec}, ConfigError);
  spec = ScenarioSpec::predator_prey(3, 1);
  spec.physics.dt = 0;
  CHECK_THROWS_AS(PredatorPrey{spec}, ConfigError);
  spec = ScenarioSpec::predator_prey(3, 1);
  spec.episode_limit = 0;
  CHECK_THROWS_AS(PredatorPrey{spec}, ConfigError);
}

TEST_CASE("reward: indicator sum over prey x predator contacts") {
  auto spec = ScenarioSpec::predator_prey(3, 2);
  PredatorPrey env(spec);
  auto s = spread_state(spec);
  CHECK(env.reward(s) == 0.0);

  // One predator overlapping one prey.
  s.predator_pos[0] = s.prey_pos[0] + Vec2(0.05, 0.0);
  CHECK(env.reward(s) == collisions(spec, s));
  CHECK(env.reward(s) == spec.reward_per_collision);

  // Two predators touching one prey.
  s.predator_pos[1] = s.prey_pos[0] + Vec2(0.0, -0.1);
  CHECK(env.reward(s) == collisions(spec, s));
  CHECK(env.reward(s) == 2 * spec.reward_per_collision);

  // One predator touching two prey.
  auto t = spread_state(spec);
  t.prey_pos[1] = t.prey_pos[0] + Vec2(0.02, 0.0);
  t.predator_pos[2] = t.prey_pos[0] + Vec2(0.01, 0.01);
  CHECK(env.reward(t) == collisions(spec, t));
  CHECK(env.reward(t) == 2 * spec.reward_per_collision);

  // Just outside the contact distance.
  auto u = spread_state(spec);
  u.predator_pos[0] = u.prey_pos[0] + Vec2(spec.physics.prey_radius + spec.physics.predator_radius + 1e-9, 0.0);
  CHECK(env.reward(u) == 0.0);
}

TEST_CASE("step: all-noop away from prey yields zero reward and advances time") {
  auto spec = ScenarioSpec::predator_prey(3, 1);
  PredatorPrey env(spec);
  auto s = spread_state(spec);
  std::vector<int> noop(3, kNoop);
  auto r = env.step(s, noop);
  CHECK(r.reward == 0.0);
  CHECK(s.t == 1);
  CHECK_FALSE(r.done);
}

TEST_CASE("step: errors on bad actions and finished episodes") {
  auto spec = ScenarioSpec::predator_prey(3, 1);
  spec.episode_limit = 2;
  PredatorPrey env(spec);
  auto s = env.reset(3);
  std::vector<int> bad{0, 5, 0};
  CHECK_THROWS_AS(env.step(s, bad), DomainError);
  std::vector<int> neg{0, -1, 0};
  CHECK_THROWS_AS(env.step(s, neg), DomainError);
  std::vector<int> short_joint{0, 0};
  CHECK_THROWS_AS(env.step(s, short_joint), ShapeError);
  std::vector<int> ok{1, 2, 3};
  CHECK_FALSE(env.step(s, ok).done);
  CHECK(env.step(s, ok).done);
  CHECK_THROWS_AS(env.step(s, ok), DomainError);
}

TEST_CASE("physics: speed clamp, immobile landmarks, single-step integration") {
  auto spec = ScenarioSpec::predator_prey(3, 1);
  spec.episode_limit = 200;
  PredatorPrey env(spec);
  auto s = env.reset(9);
  const auto landmarks = s.landmark_pos;
  std::vector<int> right(3, kRight);
  for (int k = 0; k < 150; ++k) {
    env.step(s, right);
    for (const auto& v : s.predator_vel) CHECK(v.norm() <= spec.physics.predator_max_speed + 1e-12);
    for (const auto& v : s.prey_vel) CHECK(v.norm() <= spec.physics.prey_max_speed + 1e-12);
  }
  CHECK(s.landmark_pos == landmarks);

  // From rest: v = accel * dt along the move, p += v * dt.
  auto r = env.reset(10);
  const Vec2 p0 = r.predator_pos[1];
  std::vector<int> up{kNoop, kUp, kNoop};
  env.step(r, up);
  CHECK(r.predator_vel[1].y() == doctest::Approx(spec.physics.predator_accel * spec.physics.dt));
  CHECK(r.predator_pos[1].y() == doctest::Approx(p0.y() + spec.physics.predator_accel * spec.physics.dt * spec.physics.dt));
  CHECK(r.predator_vel[0].isZero(0.0));
}

TEST_CASE("prey_policy: uniform frequencies and reproducible sequences") {
  WorldState s;
  std::mt19937_64 rng(123);
  std::array<int, kNumActions> counts{};
  const int draws = 100000;
  for (int k = 0; k < draws; ++k) ++counts[prey_policy(s, 0, rng)];
  double chi2 = 0;
  for (int c : counts) {
    CHECK(std::abs(c / double(draws) - 0.2) < 0.01);
    chi2 += (c - draws / 5.0) * (c - draws / 5.0) / (draws / 5.0);
  }
  CHECK(chi2 < 18.47);  // chi-square, 4 dof, p = 0.001

  std::mt19937_64 a(5), b(5);
  for (int k = 0; k < 100; ++k) CHECK(prey_policy(s, 0, a) == prey_policy(s, 0, b));
}

TEST_CASE("clone: deep copy with identical futures") {
  PredatorPrey env(ScenarioSpec::predator_prey(3, 1));
  auto orig = env.reset(77);
  std::vector<int> a{1, 2, 3};
  env.step(orig, a);
  const auto snapshot = orig;
  auto copy = clone(orig);
  CHECK(copy == orig);
  auto r1 = env.step(copy, a);
  CHECK(orig == snapshot);
  auto r2 = env.step(orig, a);
  CHECK(copy == orig);
  CHECK(r1.reward == r2.reward);
}

TEST_CASE("observations: layout, antisymmetric offsets, state concatenation") {
  auto spec = ScenarioSpec::predator_prey(6, 2);
  PredatorPrey env(spec);
  auto s = env.reset(4);
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> act(0, 4);
  for (int k = 0; k < 10; ++k) {
    std::vector<int> joint(6);
    for (auto& x : joint) x = act(rng);
    env.step(s, joint);
  }
  const int nl = spec.n_landmarks;
  const int n = spec.n_predators;
  auto other_offset = [&](int i, int j) {
    const auto o = env.observation(s, i);
    const int slot = j < i ? j : j - 1;
    return Vec2(o.segment<2>(4 + 2 * nl + 2 * slot));
  };
  for (int i = 0; i < n; ++i) {
    const auto o = env.observation(s, i);
    CHECK(o.allFinite());
    CHECK(Vec2(o.segment<2>(0)) == s.predator_vel[i]);
    CHECK(Vec2(o.segment<2>(2)) == s.predator_pos[i]);
    for (int j = 0; j < n; ++j) {
      if (j == i) continue;
      CHECK((other_offset(i, j) + other_offset(j, i)).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }
  const auto state = env.global_state(s);
  const auto obs = env.joint_observations(s);
  for (int i = 0; i < n; ++i) CHECK(state.segment(i * spec.obs_dim(), spec.obs_dim()) == obs.row(i).transpose());
}

TEST_CASE("episodes: deterministic, non-negative, bounded returns") {
  auto spec = ScenarioSpec::predator_prey(3, 1);
  PredatorPrey env(spec);
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> act(0, 4);
  for (int ep = 0; ep < 20; ++ep) {
    std::vector<std::vector<int>> plan(static_cast<std::size_t>(spec.episode_limit), std::vector<int>(3));
    for (auto& j : plan) {
      for (auto& a : j) a = act(rng);
    }
    auto run = [&]() {
      auto s = env.reset(1000 + ep);
      std::vector<double> rewards;
      bool done = false;
      for (int t = 0; !done; ++t) {
        auto r = env.step(s, plan[t]);
        rewards.push_back(r.reward);
        done = r.done;
      }
      return rewards;
    };
    const auto r1 = run();
    CHECK(r1 == run());
    CHECK(static_cast<int>(r1.size()) == spec.episode_limit);
    double total = 0;
    for (double r : r1) total += r;
    CHECK(total >= 0.0);
    CHECK(total <= spec.episode_limit * spec.n_prey * spec.n_predators * spec.reward_per_collision);
  }
}
