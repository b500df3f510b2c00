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

#include "wolfpack/learner/control.hpp"

#include <algorithm>

#include "wolfpack/errors.hpp"

namespace wolfpack::learner {

int argmax(const Eigen::Ref<const Eigen::VectorXd>& q) {
  if (q.size() == 0) throw DomainError("argmax of empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < q.size(); ++k) {
    if (q(k) > q(best)) best = k;
  }
  return static_cast<int>(best);
}

int argmin(const Eigen::Ref<const Eigen::VectorXd>& q) {
  if (q.size() == 0) throw DomainError("argmin of empty vector");
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < q.size(); ++k) {
    if (q(k) < q(best)) best = k;
  }
  return static_cast<int>(best);
}

int select_action(const Eigen::Ref<const Eigen::VectorXd>& q, double epsilon, std::mt19937_64& rng) {
  if (q.size() == 0) throw DomainError("select_action: empty Q vector");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw DomainError("select_action: epsilon must be in [0, 1]");
  if (std::uniform_real_distribution<double>(0.0, 1.0)(rng) < epsilon) {
    return std::uniform_int_distribution<int>(0, static_cast<int>(q.size()) - 1)(rng);
  }
  return argmax(q);
}

double EpsilonSchedule::operator()(long step) const {
  if (step < 0) throw DomainError("epsilon schedule: negative step");
  if (anneal_steps <= 0 || step >= anneal_steps) return finish;
  const double frac = static_cast<double>(step) / static_cast<double>(anneal_steps);
  return start + (finish - start) * frac;
}

namespace {

void check_layout(const ParamStore& target, const ParamStore& online) {
  if (!target.same_layout(online)) throw ConfigError("target/online parameter names or shapes differ");
}

}  // namespace

void ema_update(ParamStore& target, const ParamStore& online, double rate) {
  check_layout(target, online);
  for (std::size_t k = 0; k < target.size(); ++k) {
    auto& t = target.entries()[k].value;
    t = (1.0 - rate) * t + rate * online.entries()[k].value;
  }
}

void hard_update(ParamStore& target, const ParamStore& online) {
  check_layout(target, online);
  for (std::size_t k = 0; k < target.size(); ++k) target.entries()[k].value = online.entries()[k].value;
}

}  // namespace wolfpack::learner
