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
#include <vector>

#include "wolfpack/attack/wolfpack.hpp"

namespace wolfpack::planner {

// First element of softmax(forecast / temperature).
double attack_probability(const Eigen::VectorXd& forecast, double temperature);

// Bernoulli(p) when a window may open, false otherwise.
bool sample_init(double p, std::mt19937_64& rng, const attack::AttackSchedule& schedule);

// True when the steps left (t .. limit-1) are just enough for the remaining
// windows of t_WP + 1 steps each.
bool deadline_reached(int t, int episode_limit, const attack::AttackSchedule& schedule, int t_wp);

// k_wp disjoint windows of t_wp + 1 steps inside [0, episode_limit), uniform
// over all such placements. Returns sorted start steps.
std::vector<int> random_step_select(std::mt19937_64& rng, int k_wp, int episode_limit, int t_wp);

}  // namespace wolfpack::planner
