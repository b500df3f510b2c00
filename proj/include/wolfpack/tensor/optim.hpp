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

#include <cmath>
#include <string>
#include <unordered_map>

#include "wolfpack/errors.hpp"
#include "wolfpack/tensor/param_store.hpp"

namespace wolfpack::tensor {

struct RmsPropConfig {
  double lr = 5e-4;
  double alpha = 0.99;
  double eps = 1e-5;
};

// RMSProp without momentum:
//   v <- alpha v + (1 - alpha) g^2
//   p <- p - lr g / (sqrt(v) + eps)
template <typename Scalar>
class RmsProp {
 public:
  explicit RmsProp(RmsPropConfig config = {}) : config_(config) {}

  const RmsPropConfig& config() const { return config_; }
  void set_lr(double lr) { config_.lr = lr; }

  // Throws TrainingError naming the first parameter with a non-finite grad;
  // no parameter is modified in that case.
  void step(ParamStore<Scalar>& store) {
    for (const auto& e : store.entries()) {
      if (!e.grad.allFinite()) throw TrainingError("non-finite gradient in parameter " + e.name);
    }
    const Scalar lr = static_cast<Scalar>(config_.lr);
    const Scalar alpha = static_cast<Scalar>(config_.alpha);
    const Scalar eps = static_cast<Scalar>(config_.eps);
    for (auto& e : store.entries()) {
      auto it = square_avg_.find(e.name);
      if (it == square_avg_.end()) {
        it = square_avg_.emplace(e.name, Matrix<Scalar>::Zero(e.value.rows(), e.value.cols())).first;
      }
      auto& v = it->second;
      v = alpha * v + (Scalar(1) - alpha) * e.grad.cwiseAbs2();
      e.value.array() -= lr * e.grad.array() / (v.array().sqrt() + eps);
    }
  }

  const Matrix<Scalar>& square_avg(const std::string& name) const { return square_avg_.at(name); }

 private:
  RmsPropConfig config_;
  std::unordered_map<std::string, Matrix<Scalar>> square_avg_;
};

template <typename Scalar>
Scalar global_grad_norm(const ParamStore<Scalar>& store) {
  Scalar sq = 0;
  for (const auto& e : store.entries()) sq += e.grad.squaredNorm();
  return std::sqrt(sq);
}

// Rescales all grads so their global L2 norm is at most max_norm. Returns
// the norm before clipping.
template <typename Scalar>
Scalar clip_global_norm(ParamStore<Scalar>& store, Scalar max_norm = Scalar(10)) {
  const Scalar norm = global_grad_norm(store);
  if (norm > max_norm) {
    const Scalar s = max_norm / norm;
    for (auto& e : store.entries()) e.grad *= s;
  }
  return norm;
}

}  // namespace wolfpack::tensor
