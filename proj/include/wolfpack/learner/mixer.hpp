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

#include <string>

#include "wolfpack/core.hpp"

namespace wolfpack::learner {

enum class MixerKind { kVdn, kQmix };

MixerKind parse_mixer_kind(const std::string& name);
std::string to_string(MixerKind kind);

struct MixerConfig {
  MixerKind kind = MixerKind::kQmix;
  int n_agents = 1;
  int state_dim = 1;
  int embed = 32;
  int hypernet_layers = 2;
  int hypernet_embed = 64;
};

// Combines per-agent chosen-action values into Q^tot.
//
// VDN: Q^tot = sum_i q_i.
// QMIX: Q^tot = elu(q W1(s) + b1(s)) . w2(s) + V(s), where W1 and w2 are
// absolute values of hypernetwork outputs, so dQ^tot/dq_i >= 0.
// Parameters live under "mixer.*"; VDN has none.
class Mixer {
 public:
  explicit Mixer(MixerConfig config);

  const MixerConfig& config() const { return config_; }
  MixerKind kind() const { return config_.kind; }

  template <typename Rng>
  void init(ParamStore& store, Rng& rng) const {
    if (config_.kind == MixerKind::kVdn) return;
    const int S = config_.state_dim;
    const int n = config_.n_agents;
    const int E = config_.embed;
    const int H = config_.hypernet_embed;
    if (config_.hypernet_layers == 2) {
      tensor::init_dense(store, "mixer.hyper_w1.0", S, H, rng);
      tensor::init_dense(store, "mixer.hyper_w1.1", H, n * E, rng);
      tensor::init_dense(store, "mixer.hyper_w2.0", S, H, rng);
      tensor::init_dense(store, "mixer.hyper_w2.1", H, E, rng);
    } else {
      tensor::init_dense(store, "mixer.hyper_w1.0", S, n * E, rng);
      tensor::init_dense(store, "mixer.hyper_w2.0", S, E, rng);
    }
    tensor::init_dense(store, "mixer.hyper_b1", S, E, rng);
    tensor::init_dense(store, "mixer.v.0", S, E, rng);
    tensor::init_dense(store, "mixer.v.1", E, 1, rng);
  }

  struct Vars {
    tensor::DenseVars<double> w1_0, w1_1, w2_0, w2_1, b1, v0, v1;
  };

  template <typename Store>
  Vars bind(Tape& tape, Store& store) const {
    Vars v;
    if (config_.kind == MixerKind::kVdn) return v;
    v.w1_0 = tensor::bind_dense(tape, store, "mixer.hyper_w1.0");
    v.w2_0 = tensor::bind_dense(tape, store, "mixer.hyper_w2.0");
    if (config_.hypernet_layers == 2) {
      v.w1_1 = tensor::bind_dense(tape, store, "mixer.hyper_w1.1");
      v.w2_1 = tensor::bind_dense(tape, store, "mixer.hyper_w2.1");
    }
    v.b1 = tensor::bind_dense(tape, store, "mixer.hyper_b1");
    v.v0 = tensor::bind_dense(tape, store, "mixer.v.0");
    v.v1 = tensor::bind_dense(tape, store, "mixer.v.1");
    return v;
  }

  // q: B x n chosen-action values, state: B x state_dim -> B x 1.
  Var forward(const Vars& p, const Var& q, const Var& state) const;

  // Q^tot for each row of q (k x n) under one shared state.
  Eigen::VectorXd evaluate(const ParamStore& store, const Eigen::MatrixXd& q, const Eigen::VectorXd& state) const;

  double evaluate(const ParamStore& store, const Eigen::VectorXd& q, const Eigen::VectorXd& state) const;

  // dQ^tot/dq at (q, state).
  Eigen::VectorXd grad_q(const ParamStore& store, const Eigen::VectorXd& q, const Eigen::VectorXd& state) const;

 private:
  MixerConfig config_;
};

double mix_vdn(const Eigen::VectorXd& q_taken);

}  // namespace wolfpack::learner
