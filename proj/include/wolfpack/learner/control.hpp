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

#include "wolfpack/core.hpp"

namespace wolfpack::learner {

// Index of the largest entry; ties go to the lowest index.
int argmax(const Eigen::Ref<const Eigen::VectorXd>& q);
int argmin(const Eigen::Ref<const Eigen::VectorXd>& q);

// Greedy with probability 1 - epsilon, otherwise uniform over all actions.
int select_action(const Eigen::Ref<const Eigen::VectorXd>& q, double epsilon, std::mt19937_64& rng);

struct EpsilonSchedule {
  double start = 1.0;
  double finish = 0.05;
  long anneal_steps = 50000;

  // Linear from start to finish over anneal_steps, then constant.
  double operator()(long step) const;
};

// target <- (1 - rate) target + rate online, entry by entry.
void ema_update(ParamStore& target, const ParamStore& online, double rate);

// target <- online
void hard_update(ParamStore& target, const ParamStore& online);

}  // namespace wolfpack::learner
