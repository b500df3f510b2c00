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

#include <stdexcept>
#include <string>

namespace wolfpack {

// Invalid configuration values (scenario dims, attack sizes, unknown keys).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Argument outside an operation's domain (temperature <= 0, bad action id).
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};

struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Non-finite gradients or losses during optimization.
struct TrainingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Checkpoint could not be read or does not match the expected layout.
struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace wolfpack
