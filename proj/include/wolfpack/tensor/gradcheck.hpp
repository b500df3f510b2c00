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

#include <algorithm>
#include <cmath>
#include <functional>

#include "wolfpack/tensor/tape.hpp"

namespace wolfpack::tensor {

struct GradCheckResult {
  double max_rel_error = 0;
  double max_abs_error = 0;
  std::string worst_param;
};

// Compares tape gradients with central differences for every scalar of
// every entry in `params`. `loss` builds a scalar on the given tape, binding
// parameters with tape.param(params, ...).
//
// Relative error is |analytic - numeric| / max(|analytic|, |numeric|, floor);
// the floor keeps near-zero gradients from dominating through rounding noise.
template <typename Scalar>
GradCheckResult finite_diff_check(const std::function<Var<Scalar>(Tape<Scalar>&, ParamStore<Scalar>&)>& loss,
                                  ParamStore<Scalar>& params, Scalar epsilon = Scalar(1e-6),
                                  Scalar floor = Scalar(1e-5)) {
  params.zero_grad();
  {
    Tape<Scalar> tape;
    tape.backward(loss(tape, params));
  }
  auto eval = [&]() {
    Tape<Scalar> tape(false);
    return loss(tape, params).value()(0, 0);
  };
  GradCheckResult result;
  for (auto& e : params.entries()) {
    for (Eigen::Index i = 0; i < e.value.size(); ++i) {
      Scalar& p = e.value.data()[i];
      const Scalar saved = p;
      p = saved + epsilon;
      const Scalar up = eval();
      p = saved - epsilon;
      const Scalar down = eval();
      p = saved;
      const Scalar numeric = (up - down) / (Scalar(2) * epsilon);
      const Scalar analytic = e.grad.data()[i];
      const double abs_err = std::abs(static_cast<double>(analytic - numeric));
      const double denom = std::max({std::abs(static_cast<double>(analytic)),
                                     std::abs(static_cast<double>(numeric)), static_cast<double>(floor)});
      const double rel = abs_err / denom;
      result.max_abs_error = std::max(result.max_abs_error, abs_err);
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = e.name;
      }
    }
  }
  return result;
}

}  // namespace wolfpack::tensor
