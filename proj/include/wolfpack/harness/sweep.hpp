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

#include <string>
#include <vector>

#include <json.hpp>

#include "wolfpack/harness/config.hpp"

namespace wolfpack::harness {

struct SweepCell {
  int index = 0;
  nlohmann::json assignment;  // dotted key -> value
  RunConfig config;
  bool feasible = true;
  std::string reason;
};

// Cartesian product over a grid object mapping config keys to value lists.
// Keys are dotted paths ("attack.m", "planner.T") or the short names m, T,
// K_WP, t_WP, init_mode, followup_mode, step_mode, budget_mode. Cells are
// ordered with the last key varying fastest, keys in sorted order.
std::vector<SweepCell> expand_grid(const RunConfig& base, const nlohmann::json& grid);

struct SweepOptions {
  std::string out_dir;
  int jobs = 1;
  bool quiet = true;
};

// One train + evaluate per feasible cell and seed. Each run writes
// <out>/cell_<i>/seed_<s>/metrics.jsonl; skipped cells are logged to
// <out>/sweep.jsonl. Returns the evaluation rows.
std::vector<nlohmann::json> sweep(const RunConfig& base, const nlohmann::json& grid, const SweepOptions& options);

}  // namespace wolfpack::harness
