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

#include "wolfpack/planner/step.hpp"

#include <algorithm>
#include <numeric>

#include "wolfpack/errors.hpp"
#include "wolfpack/tensor/softmax.hpp"

namespace wolfpack::planner {

double attack_probability(const Eigen::VectorXd& forecast, double temperature) {
  return tensor::softmax(forecast, temperature)(0);
}

bool sample_init(double p, std::mt19937_64& rng, const attack::AttackSchedule& schedule) {
  if (!(p >= 0.0 && p <= 1.0)) throw DomainError("sample_init: probability outside [0, 1]");
  if (!schedule.can_open()) return false;
  return std::bernoulli_distribution(p)(rng);
}

bool deadline_reached(int t, int episode_limit, const attack::AttackSchedule& schedule, int t_wp) {
  if (!schedule.can_open()) return false;
  return episode_limit - t <= schedule.wolfpacks_remaining * (t_wp + 1);
}

std::vector<int> random_step_select(std::mt19937_64& rng, int k_wp, int episode_limit, int t_wp) {
  if (k_wp < 0 || t_wp < 0 || episode_limit < 1) throw ConfigError("random_step_select: invalid sizes");
  const int slack = episode_limit - k_wp * (t_wp + 1);
  if (slack < 0) throw ConfigError("random_step_select: windows do not fit in the episode");
  // Stars and bars: k sorted picks among slack + k slots.
  std::vector<int> slots(static_cast<std::size_t>(slack + k_wp));
  std::iota(slots.begin(), slots.end(), 0);
  std::vector<int> picks;
  std::sample(slots.begin(), slots.end(), std::back_inserter(picks), k_wp, rng);
  for (int k = 0; k < k_wp; ++k) picks[k] += k * t_wp;
  return picks;
}

}  // namespace wolfpack::planner
