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

#include <random>
#include <string>
#include <vector>

#include "wolfpack/core.hpp"
#include "wolfpack/episode.hpp"

namespace wolfpack::planner {

struct PlannerConfig {
  int window = 20;    // input sequence length W
  int horizon = 20;   // forecast length L
  int embed = 64;
  int ff = 128;
  double temperature = 0.5;
};

// Linear token embedding, learned positions and one causal attention block.
class SequenceEncoder {
 public:
  SequenceEncoder(std::string prefix, int input_dim, const PlannerConfig& config);

  template <typename Rng>
  void init(ParamStore& store, Rng& rng) const {
    tensor::init_dense(store, prefix_ + ".embed", input_dim_, embed_, rng);
    std::normal_distribution<double> g(0.0, 0.02);
    Eigen::MatrixXd pos(window_, embed_);
    for (Eigen::Index i = 0; i < pos.size(); ++i) pos.data()[i] = g(rng);
    store.add(prefix_ + ".pos", std::move(pos));
    tensor::init_attention_block(store, prefix_ + ".attn", embed_, ff_, rng);
  }

  // tokens: (B*W) x input_dim, sequence b occupying rows b*W.. with
  // lengths[b] real tokens first. Returns (B*W) x embed.
  template <typename Store>
  Var encode(Tape& tape, Store& store, const Eigen::MatrixXd& tokens, const std::vector<Eigen::Index>& lengths) const {
    auto x = tensor::dense(tape.constant(tokens), tensor::bind_dense(tape, store, prefix_ + ".embed"));
    x = tensor::add_tiled(x, tape.param(store, prefix_ + ".pos"));
    return tensor::attention_block(x, tensor::bind_attention_block(tape, store, prefix_ + ".attn"), window_, lengths,
                                   true);
  }

  int window() const { return window_; }
  int input_dim() const { return input_dim_; }

 private:
  std::string prefix_;
  int input_dim_;
  int window_;
  int embed_;
  int ff_;
};

// Steps [max(0, end - W), end) of an episode. `labels` (one per step) is
// only needed by the Q-difference model.
struct WindowRef {
  const EpisodeRecord* episode = nullptr;
  const Eigen::VectorXd* labels = nullptr;
  int end = 1;
};

// `count` windows: uniform episode, then uniform end in [1, length].
// `labels` is empty or parallel to `episodes`.
std::vector<WindowRef> sample_windows(const std::vector<const EpisodeRecord*>& episodes,
                                      const std::vector<const Eigen::VectorXd*>& labels, int count,
                                      std::mt19937_64& rng);

struct PlanningBatch {
  Eigen::MatrixXd tokens;        // (B*W) x (S + n*A)
  Eigen::MatrixXd base_state;    // s_k
  Eigen::MatrixXd base_obs;      // o_k, agents concatenated
  Eigen::MatrixXd target_state;  // s_{k+1}
  Eigen::MatrixXd target_obs;    // o_{k+1}
  Eigen::VectorXd valid;         // 1 on real token rows
  std::vector<Eigen::Index> lengths;
};

// Predicts (s_{k+1}, o_{k+1}) from tokens (s_j, a_j), j <= k, as residuals
// on (s_k, o_k).
class PlanningModel {
 public:
  PlanningModel(const PlannerConfig& config, int state_dim, int n_agents, int obs_dim, int n_actions = 5);

  template <typename Rng>
  void init(ParamStore& store, Rng& rng) const {
    encoder_.init(store, rng);
    tensor::init_dense(store, "planner.state_head", config_.embed, state_dim_, rng);
    tensor::init_dense(store, "planner.obs_head", config_.embed, n_agents_ * obs_dim_, rng);
  }

  PlanningBatch make_batch(const std::vector<WindowRef>& windows) const;

  struct Prediction {
    Var state;
    Var obs;
  };

  template <typename Store>
  Prediction forward(Tape& tape, Store& store, const PlanningBatch& batch) const {
    auto h = encoder_.encode(tape, store, batch.tokens, batch.lengths);
    auto ds = tensor::dense(h, tensor::bind_dense(tape, store, "planner.state_head"));
    auto dob = tensor::dense(h, tensor::bind_dense(tape, store, "planner.obs_head"));
    return {tensor::add(tape.constant(batch.base_state), ds), tensor::add(tape.constant(batch.base_obs), dob)};
  }

  // Mean over real tokens of |s - s_hat|^2 + |o - o_hat|^2.
  Var loss(Tape& tape, ParamStore& store, const PlanningBatch& batch) const;
  double loss_value(const ParamStore& store, const PlanningBatch& batch) const;

  // Refits both linear heads by ridge regression on the encoder features of
  // the real tokens in `batch`, encoder held fixed. Returns the new loss.
  double fit_heads(ParamStore& store, const PlanningBatch& batch, double ridge = 1e-10) const;

  // Next (state, flat obs) after the last of `states.rows()` tokens.
  // states: k x S, obs: k x (n*d), actions: k x n with k <= W.
  std::pair<Eigen::VectorXd, Eigen::VectorXd> predict(const ParamStore& store, const Eigen::MatrixXd& states,
                                                      const Eigen::MatrixXd& obs,
                                                      const Eigen::MatrixXi& actions) const;

  const PlannerConfig& config() const { return config_; }
  int state_dim() const { return state_dim_; }
  int token_dim() const { return state_dim_ + n_agents_ * n_actions_; }

 private:
  void fill_token(Eigen::MatrixXd& tokens, Eigen::Index row, const Eigen::RowVectorXd& state,
                  const Eigen::RowVectorXi& actions) const;

  PlannerConfig config_;
  int state_dim_;
  int n_agents_;
  int obs_dim_;
  int n_actions_;
  SequenceEncoder encoder_;
};

struct QdiffBatch {
  Eigen::MatrixXd tokens;   // (B*W) x S
  Eigen::MatrixXd targets;  // (B*W) x L
  Eigen::MatrixXd mask;     // (B*W) x L, 1 where a target exists
  std::vector<Eigen::Index> lengths;
};

// Forecasts (dQ^WP_t, ..., dQ^WP_{t+L-1}) from the states up to t.
class QdiffModel {
 public:
  QdiffModel(const PlannerConfig& config, int state_dim);

  template <typename Rng>
  void init(ParamStore& store, Rng& rng) const {
    encoder_.init(store, rng);
    tensor::init_dense(store, "qdiff.head", config_.embed, config_.horizon, rng);
  }

  QdiffBatch make_batch(const std::vector<WindowRef>& windows) const;

  template <typename Store>
  Var forward(Tape& tape, Store& store, const Eigen::MatrixXd& tokens,
              const std::vector<Eigen::Index>& lengths) const {
    return tensor::dense(encoder_.encode(tape, store, tokens, lengths),
                         tensor::bind_dense(tape, store, "qdiff.head"));
  }

  // Masked mean squared error.
  Var loss(Tape& tape, ParamStore& store, const QdiffBatch& batch) const;
  double loss_value(const ParamStore& store, const QdiffBatch& batch) const;

  // Forecast read at the last of the given states (k x S, 1 <= k <= W).
  Eigen::VectorXd predict(const ParamStore& store, const Eigen::MatrixXd& states) const;

  const PlannerConfig& config() const { return config_; }

 private:
  PlannerConfig config_;
  int state_dim_;
  SequenceEncoder encoder_;
};

}  // namespace wolfpack::planner
