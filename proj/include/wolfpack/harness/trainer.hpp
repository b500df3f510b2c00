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

#include <cstdint>
#include <functional>
#include <memory>
#include <string>

#include <json.hpp>

#include "wolfpack/harness/config.hpp"
#include "wolfpack/harness/metrics.hpp"
#include "wolfpack/harness/runner.hpp"

namespace wolfpack::harness {

struct TrainOptions {
  std::string out_dir;  // empty: no files
  std::string run_id = "run";
  nlohmann::json tags = nlohmann::json::object();  // merged into every row
  MetricsWriter* metrics = nullptr;
  std::function<void(const nlohmann::json&)> on_row;
};

struct TrainResult {
  std::unique_ptr<Models> models;
  std::string vanilla_checkpoint;
  std::string final_checkpoint;
  long env_steps = 0;
  long episodes = 0;
  long pretrain_attacked_steps = 0;
  long adversarial_attacked_steps = 0;
  double mean_return_last100 = 0;
};

// Vanilla pretraining for pretrain_steps, then adversarial training against
// the wolfpack attacker reading the current networks until total_steps.
// Throws TrainingError on a non-finite loss after writing diagnostic.json.
TrainResult train(const RunConfig& config, std::uint64_t seed, const TrainOptions& options = {});

}  // namespace wolfpack::harness
