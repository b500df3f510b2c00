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

#include "wolfpack/tensor/layers.hpp"
#include "wolfpack/tensor/ops.hpp"
#include "wolfpack/tensor/param_store.hpp"
#include "wolfpack/tensor/tape.hpp"

// Double-precision aliases used by everything above the tensor core.
namespace wolfpack {

using Tape = tensor::Tape<double>;
using Var = tensor::Var<double>;
using ParamStore = tensor::ParamStore<double>;

}  // namespace wolfpack
