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

#include <cmath>

#include "wolfpack/errors.hpp"

namespace wolfpack::tensor {

// softmax(x / temperature) with max subtraction.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> softmax(const Eigen::MatrixBase<Derived>& x,
                                                                  typename Derived::Scalar temperature = 1) {
  using Scalar = typename Derived::Scalar;
  if (!(temperature > Scalar(0))) throw DomainError("softmax: temperature must be > 0");
  if (x.size() == 0) throw DomainError("softmax: empty input");
  if (!x.allFinite()) throw DomainError("softmax: non-finite input");
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = x.reshaped() / temperature;
  z = (z.array() - z.maxCoeff()).exp();
  return z / z.sum();
}

// log(softmax(x)) computed as x - logsumexp(x).
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> log_softmax(const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> z = x.reshaped();
  const Scalar mx = z.maxCoeff();
  const Scalar lse = mx + std::log((z.array() - mx).exp().sum());
  return (z.array() - lse).matrix();
}

}  // namespace wolfpack::tensor
