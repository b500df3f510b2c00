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
#include <random>
#include <string>

#include "wolfpack/tensor/ops.hpp"

namespace wolfpack::tensor {

enum class Activation { kNone, kRelu, kElu, kTanh };

// Registers an (in x out) weight and a (1 x out) bias named
// `<prefix>.w` / `<prefix>.b`, both uniform in +-1/sqrt(in).
template <typename Scalar, typename Rng>
void init_dense(ParamStore<Scalar>& store, const std::string& prefix, Eigen::Index in, Eigen::Index out,
                Rng& rng) {
  const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(in));
  std::uniform_real_distribution<Scalar> u(-bound, bound);
  Matrix<Scalar> w(in, out);
  Matrix<Scalar> b(1, out);
  for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = u(rng);
  for (Eigen::Index i = 0; i < b.size(); ++i) b.data()[i] = u(rng);
  store.add(prefix + ".w", std::move(w));
  store.add(prefix + ".b", std::move(b));
}

template <typename Scalar>
struct DenseVars {
  Var<Scalar> w;
  Var<Scalar> b;
};

template <typename Scalar, typename Store>
DenseVars<Scalar> bind_dense(Tape<Scalar>& tape, Store& store, const std::string& prefix) {
  return {tape.param(store, prefix + ".w"), tape.param(store, prefix + ".b")};
}

template <typename Scalar>
Var<Scalar> activate(const Var<Scalar>& x, Activation act) {
  switch (act) {
    case Activation::kRelu:
      return relu(x);
    case Activation::kElu:
      return elu(x);
    case Activation::kTanh:
      return tanh(x);
    case Activation::kNone:
      break;
  }
  return x;
}

// x (rows x in) -> act(x W + b) (rows x out)
template <typename Scalar>
Var<Scalar> dense(const Var<Scalar>& x, const DenseVars<Scalar>& p, Activation act = Activation::kNone) {
  return activate(add_row(matmul(x, p.w), p.b), act);
}

// GRU cell with gates packed as [reset | update | candidate] along columns:
//   r = sigmoid(x Wi_r + bi_r + h Wh_r + bh_r)
//   z = sigmoid(x Wi_z + bi_z + h Wh_z + bh_z)
//   n = tanh(x Wi_n + bi_n + r * (h Wh_n + bh_n))
//   h' = (1 - z) * n + z * h
template <typename Scalar, typename Rng>
void init_gru(ParamStore<Scalar>& store, const std::string& prefix, Eigen::Index in, Eigen::Index hidden,
              Rng& rng) {
  init_dense(store, prefix + ".in", in, 3 * hidden, rng);
  // PyTorch-style: both input and recurrent weights use 1/sqrt(hidden).
  const Scalar bound = Scalar(1) / std::sqrt(static_cast<Scalar>(hidden));
  std::uniform_real_distribution<Scalar> u(-bound, bound);
  auto& wi = store.at(prefix + ".in.w").value;
  for (Eigen::Index i = 0; i < wi.size(); ++i) wi.data()[i] = u(rng);
  init_dense(store, prefix + ".hid", hidden, 3 * hidden, rng);
}

template <typename Scalar>
struct GruVars {
  DenseVars<Scalar> in;
  DenseVars<Scalar> hid;
};

template <typename Scalar, typename Store>
GruVars<Scalar> bind_gru(Tape<Scalar>& tape, Store& store, const std::string& prefix) {
  return {bind_dense(tape, store, prefix + ".in"), bind_dense(tape, store, prefix + ".hid")};
}

template <typename Scalar>
Var<Scalar> gru_step(const Var<Scalar>& x, const Var<Scalar>& h, const GruVars<Scalar>& p) {
  const auto H = h.cols();
  if (p.hid.w.rows() != H || p.hid.w.cols() != 3 * H || x.cols() != p.in.w.rows()) {
    throw ShapeError("gru_step: input/hidden width does not match parameters");
  }
  if (x.rows() != h.rows()) throw ShapeError("gru_step: batch mismatch");
  auto gi = dense(x, p.in);
  auto gh = dense(h, p.hid);
  auto r = sigmoid(add(slice_cols(gi, 0, H), slice_cols(gh, 0, H)));
  auto z = sigmoid(add(slice_cols(gi, H, H), slice_cols(gh, H, H)));
  auto n = tanh(add(slice_cols(gi, 2 * H, H), mul(r, slice_cols(gh, 2 * H, H))));
  // (1 - z) * n + z * h = n + z * (h - n)
  return add(n, mul(z, sub(h, n)));
}

// Single-head decoder block: residual masked attention followed by a
// residual position-wise ReLU feed-forward layer.
template <typename Scalar, typename Rng>
void init_attention_block(ParamStore<Scalar>& store, const std::string& prefix, Eigen::Index d,
                          Eigen::Index ff, Rng& rng) {
  init_dense(store, prefix + ".q", d, d, rng);
  init_dense(store, prefix + ".k", d, d, rng);
  init_dense(store, prefix + ".v", d, d, rng);
  init_dense(store, prefix + ".o", d, d, rng);
  init_dense(store, prefix + ".ff1", d, ff, rng);
  init_dense(store, prefix + ".ff2", ff, d, rng);
}

template <typename Scalar>
struct AttentionVars {
  DenseVars<Scalar> q, k, v, o, ff1, ff2;
};

template <typename Scalar, typename Store>
AttentionVars<Scalar> bind_attention_block(Tape<Scalar>& tape, Store& store, const std::string& prefix) {
  return {bind_dense(tape, store, prefix + ".q"),   bind_dense(tape, store, prefix + ".k"),
          bind_dense(tape, store, prefix + ".v"),   bind_dense(tape, store, prefix + ".o"),
          bind_dense(tape, store, prefix + ".ff1"), bind_dense(tape, store, prefix + ".ff2")};
}

// x: (B*T) x d stacked sequences; lengths[b] valid tokens in sequence b.
template <typename Scalar>
Var<Scalar> attention_block(const Var<Scalar>& x, const AttentionVars<Scalar>& p, Eigen::Index T,
                            std::vector<Eigen::Index> lengths, bool causal) {
  if (T <= 0) throw DomainError("attention_block: empty sequence");
  auto att = masked_attention(dense(x, p.q), dense(x, p.k), dense(x, p.v), T, std::move(lengths), causal);
  auto h = add(x, dense(att, p.o));
  return add(h, dense(dense(h, p.ff1, Activation::kRelu), p.ff2));
}

}  // namespace wolfpack::tensor
