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

#include <vector>

#include "wolfpack/core.hpp"
#include "wolfpack/episode.hpp"
#include "wolfpack/learner/agent_net.hpp"
#include "wolfpack/learner/mixer.hpp"

namespace wolfpack::learner {

struct TdConfig {
  double gamma = 0.99;
  // Bootstrap action from the online network's per-agent argmax; when false
  // the target network's own max is used.
  bool double_q = true;
};

struct TdStats {
  double loss = 0;
  double mean_q_tot = 0;
  double mean_target = 0;
  int transitions = 0;
};

// Builds the masked TD loss over whole episodes, unrolled from zero hidden
// states. Online parameters are bound with tape.param(online, ...) so a
// backward pass accumulates into online's grads; the target store is
// read-only. Executed (stored) actions are the taken actions.
Var td_loss_graph(Tape& tape, const std::vector<const EpisodeRecord*>& batch, const AgentNet& agent,
                  const Mixer& mixer, ParamStore& online, const ParamStore& target, const TdConfig& config,
                  TdStats* stats = nullptr);

// Zeroes online grads, builds the loss, runs backward. Throws on an empty batch.
TdStats td_loss(const std::vector<const EpisodeRecord*>& batch, const AgentNet& agent, const Mixer& mixer,
                ParamStore& online, const ParamStore& target, const TdConfig& config);

}  // namespace wolfpack::learner
