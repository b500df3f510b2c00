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

#include "wolfpack/learner/mixer.hpp"

#include "wolfpack/errors.hpp"

namespace wolfpack::learner {

MixerKind parse_mixer_kind(const std::string& name) {
  if (name == "vdn") return MixerKind::kVdn;
  if (name == "qmix") return MixerKind::kQmix;
  throw ConfigError("unknown mixer kind: " + name);
}

std::string to_string(MixerKind kind) { return kind == MixerKind::kVdn ? "vdn" : "qmix"; }

Mixer::Mixer(MixerConfig config) : config_(config) {
  if (config_.n_agents <= 0 || config_.state_dim <= 0) throw ConfigError("mixer: dimensions must be positive");
  if (config_.kind == MixerKind::kQmix &&
      (config_.embed <= 0 || config_.hypernet_embed <= 0 ||
       (config_.hypernet_layers != 1 && config_.hypernet_layers != 2))) {
    throw ConfigError("mixer: invalid QMIX sizes (hypernet_layers must be 1 or 2)");
  }
}

Var Mixer::forward(const Vars& p, const Var& q, const Var& state) const {
  if (q.cols() != config_.n_agents) throw ShapeError("mixer: expected one value per agent");
  if (config_.kind == MixerKind::kVdn) return tensor::row_sum(q);
  if (state.cols() != config_.state_dim || state.rows() != q.rows()) throw ShapeError("mixer: state shape mismatch");
  using tensor::Activation;
  const bool deep = config_.hypernet_layers == 2;
  auto w1 = deep ? tensor::dense(tensor::dense(state, p.w1_0, Activation::kRelu), p.w1_1)
                 : tensor::dense(state, p.w1_0);
  auto w2 = deep ? tensor::dense(tensor::dense(state, p.w2_0, Activation::kRelu), p.w2_1)
                 : tensor::dense(state, p.w2_0);
  auto b1 = tensor::dense(state, p.b1);
  auto hidden = tensor::elu(tensor::add(tensor::batched_vecmat(q, tensor::abs(w1), config_.embed), b1));
  auto v = tensor::dense(tensor::dense(state, p.v0, Activation::kRelu), p.v1);
  return tensor::add(tensor::rowwise_dot(hidden, tensor::abs(w2)), v);
}

Eigen::VectorXd Mixer::evaluate(const ParamStore& store, const Eigen::MatrixXd& q,
                                const Eigen::VectorXd& state) const {
  if (config_.kind == MixerKind::kVdn) return q.rowwise().sum();
  Tape tape(false);
  const auto vars = bind(tape, store);
  Eigen::MatrixXd states = state.transpose().replicate(q.rows(), 1);
  return forward(vars, tape.constant(q), tape.constant(std::move(states))).value().col(0);
}

double Mixer::evaluate(const ParamStore& store, const Eigen::VectorXd& q, const Eigen::VectorXd& state) const {
  return evaluate(store, Eigen::MatrixXd(q.transpose()), state)(0);
}

Eigen::VectorXd Mixer::grad_q(const ParamStore& store, const Eigen::VectorXd& q, const Eigen::VectorXd& state) const {
  if (config_.kind == MixerKind::kVdn) return Eigen::VectorXd::Ones(q.size());
  Tape tape;
  const auto vars = bind(tape, store);
  auto qv = tape.input(q.transpose());
  auto out = forward(vars, qv, tape.constant(state.transpose()));
  tape.backward(out);
  return tape.grad(qv.id()).row(0).transpose();
}

double mix_vdn(const Eigen::VectorXd& q_taken) { return q_taken.sum(); }

}  // namespace wolfpack::learner
