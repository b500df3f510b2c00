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
#include <limits>
#include <string>
#include <type_traits>
#include <vector>

#include "wolfpack/errors.hpp"
#include "wolfpack/tensor/tape.hpp"

// Differentiable primitives over Tape nodes. Every op records exactly one
// node. Shapes are (rows x cols); batched rows are independent samples.
namespace wolfpack::tensor {

namespace detail {

inline void require(bool ok, const char* op, const std::string& what) {
  if (!ok) throw ShapeError(std::string(op) + ": " + what);
}

template <typename Scalar>
void same_shape(const Var<Scalar>& a, const Var<Scalar>& b, const char* op) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), op, "shape mismatch");
}

}  // namespace detail

template <typename Scalar>
Var<Scalar> matmul(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::require(a.cols() == b.rows(), "matmul", "inner dimension mismatch");
  auto& t = a.tape();
  return t.record(a.value() * b.value(), {a, b}, [a, b](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    if (t.requires_grad(a.id())) t.accumulate(a, g * b.value().transpose());
    if (t.requires_grad(b.id())) t.accumulate(b, a.value().transpose() * g);
  });
}

template <typename Scalar>
Var<Scalar> add(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::same_shape(a, b, "add");
  return a.tape().record(a.value() + b.value(), {a, b}, [a, b](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a, g);
    t.accumulate(b, g);
  });
}

template <typename Scalar>
Var<Scalar> sub(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::same_shape(a, b, "sub");
  return a.tape().record(a.value() - b.value(), {a, b}, [a, b](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a, g);
    t.accumulate(b, -g);
  });
}

// Elementwise product.
template <typename Scalar>
Var<Scalar> mul(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::same_shape(a, b, "mul");
  Matrix<Scalar> v = a.value().cwiseProduct(b.value());
  return a.tape().record(std::move(v), {a, b}, [a, b](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    if (t.requires_grad(a.id())) t.accumulate(a, g.cwiseProduct(b.value()));
    if (t.requires_grad(b.id())) t.accumulate(b, g.cwiseProduct(a.value()));
  });
}

// alpha * a + beta
template <typename Scalar>
Var<Scalar> affine(const Var<Scalar>& a, Scalar alpha, Scalar beta) {
  Matrix<Scalar> v = (alpha * a.value().array() + beta).matrix();
  return a.tape().record(std::move(v), {a}, [a, alpha](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(a, alpha * t.grad(self));
  });
}

// Adds a 1 x c row to every row of a.
template <typename Scalar>
Var<Scalar> add_row(const Var<Scalar>& a, const Var<Scalar>& row) {
  detail::require(row.rows() == 1 && row.cols() == a.cols(), "add_row", "bias must be 1 x cols");
  Matrix<Scalar> v = a.value().rowwise() + row.value().row(0);
  return a.tape().record(std::move(v), {a, row}, [a, row](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a, g);
    if (t.requires_grad(row.id())) t.accumulate(row, g.colwise().sum());
  });
}

// Adds a (T x c) block to each consecutive group of T rows of a.
template <typename Scalar>
Var<Scalar> add_tiled(const Var<Scalar>& a, const Var<Scalar>& block) {
  const auto T = block.rows();
  detail::require(T > 0 && a.rows() % T == 0 && a.cols() == block.cols(), "add_tiled",
                  "rows must be a multiple of the block");
  Matrix<Scalar> v = a.value();
  const auto blocks = a.rows() / T;
  for (Eigen::Index b = 0; b < blocks; ++b) v.middleRows(b * T, T) += block.value();
  return a.tape().record(std::move(v), {a, block}, [a, block, T, blocks](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    t.accumulate(a, g);
    if (t.requires_grad(block.id())) {
      Matrix<Scalar> gb = Matrix<Scalar>::Zero(T, g.cols());
      for (Eigen::Index b = 0; b < blocks; ++b) gb += g.middleRows(b * T, T);
      t.accumulate(block, gb);
    }
  });
}

template <typename Scalar>
Var<Scalar> relu(const Var<Scalar>& a) {
  Matrix<Scalar> v = a.value().cwiseMax(Scalar(0));
  return a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(a, (a.value().array() > Scalar(0)).select(t.grad(self), Scalar(0)));
  });
}

// ELU with alpha = 1.
template <typename Scalar>
Var<Scalar> elu(const Var<Scalar>& a) {
  Matrix<Scalar> v = (a.value().array() > Scalar(0)).select(a.value(), a.value().array().exp() - Scalar(1));
  return a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    const auto& x = a.value().array();
    Matrix<Scalar> d = (x > Scalar(0)).select(Matrix<Scalar>::Ones(x.rows(), x.cols()).array(), x.exp());
    t.accumulate(a, t.grad(self).cwiseProduct(d));
  });
}

template <typename Scalar>
Var<Scalar> tanh(const Var<Scalar>& a) {
  Matrix<Scalar> v = a.value().array().tanh();
  auto out = a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    const auto& y = t.value(self).array();
    t.accumulate(a, (t.grad(self).array() * (Scalar(1) - y.square())).matrix());
  });
  return out;
}

template <typename Scalar>
Var<Scalar> sigmoid(const Var<Scalar>& a) {
  Matrix<Scalar> v = (Scalar(1) / (Scalar(1) + (-a.value().array()).exp())).matrix();
  return a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    const auto& y = t.value(self).array();
    t.accumulate(a, (t.grad(self).array() * y * (Scalar(1) - y)).matrix());
  });
}

template <typename Scalar>
Var<Scalar> abs(const Var<Scalar>& a) {
  Matrix<Scalar> v = a.value().cwiseAbs();
  return a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    const auto& x = a.value().array();
    Matrix<Scalar> s = x.sign().matrix();
    t.accumulate(a, t.grad(self).cwiseProduct(s));
  });
}

template <typename Scalar>
Var<Scalar> square(const Var<Scalar>& a) {
  Matrix<Scalar> v = a.value().array().square();
  return a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(a, (Scalar(2) * t.grad(self).array() * a.value().array()).matrix());
  });
}

// Sum of all entries, 1 x 1.
template <typename Scalar>
Var<Scalar> sum(const Var<Scalar>& a) {
  Matrix<Scalar> v(1, 1);
  v(0, 0) = a.value().sum();
  return a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(a, Matrix<Scalar>::Constant(a.rows(), a.cols(), t.grad(self)(0, 0)));
  });
}

// Row sums, rows x 1.
template <typename Scalar>
Var<Scalar> row_sum(const Var<Scalar>& a) {
  Matrix<Scalar> v = a.value().rowwise().sum();
  return a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    t.accumulate(a, t.grad(self).replicate(1, a.cols()));
  });
}

template <typename Scalar>
Var<Scalar> concat_cols(const std::vector<Var<Scalar>>& parts) {
  detail::require(!parts.empty(), "concat_cols", "no inputs");
  const auto rows = parts.front().rows();
  Eigen::Index cols = 0;
  for (const auto& p : parts) {
    detail::require(p.rows() == rows, "concat_cols", "row mismatch");
    cols += p.cols();
  }
  Matrix<Scalar> v(rows, cols);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    v.middleCols(off, p.cols()) = p.value();
    off += p.cols();
  }
  return parts.front().tape().record(std::move(v), parts, [parts](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    Eigen::Index o = 0;
    for (const auto& p : parts) {
      t.accumulate(p, g.middleCols(o, p.cols()));
      o += p.cols();
    }
  });
}

template <typename Scalar>
Var<Scalar> concat_rows(const std::vector<Var<Scalar>>& parts) {
  detail::require(!parts.empty(), "concat_rows", "no inputs");
  const auto cols = parts.front().cols();
  Eigen::Index rows = 0;
  for (const auto& p : parts) {
    detail::require(p.cols() == cols, "concat_rows", "column mismatch");
    rows += p.rows();
  }
  Matrix<Scalar> v(rows, cols);
  Eigen::Index off = 0;
  for (const auto& p : parts) {
    v.middleRows(off, p.rows()) = p.value();
    off += p.rows();
  }
  return parts.front().tape().record(std::move(v), parts, [parts](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    Eigen::Index o = 0;
    for (const auto& p : parts) {
      t.accumulate(p, g.middleRows(o, p.rows()));
      o += p.rows();
    }
  });
}

template <typename Scalar>
Var<Scalar> slice_cols(const Var<Scalar>& a, Eigen::Index start, Eigen::Index count) {
  detail::require(start >= 0 && count >= 0 && start + count <= a.cols(), "slice_cols", "out of range");
  Matrix<Scalar> v = a.value().middleCols(start, count);
  return a.tape().record(std::move(v), {a}, [a, start, count](Tape<Scalar>& t, std::size_t self) {
    Matrix<Scalar> g = Matrix<Scalar>::Zero(a.rows(), a.cols());
    g.middleCols(start, count) = t.grad(self);
    t.accumulate(a, g);
  });
}

template <typename Scalar>
Var<Scalar> slice_rows(const Var<Scalar>& a, Eigen::Index start, Eigen::Index count) {
  detail::require(start >= 0 && count >= 0 && start + count <= a.rows(), "slice_rows", "out of range");
  Matrix<Scalar> v = a.value().middleRows(start, count);
  return a.tape().record(std::move(v), {a}, [a, start, count](Tape<Scalar>& t, std::size_t self) {
    Matrix<Scalar> g = Matrix<Scalar>::Zero(a.rows(), a.cols());
    g.middleRows(start, count) = t.grad(self);
    t.accumulate(a, g);
  });
}

// Picks rows by index (repeats allowed); backward scatter-adds.
template <typename Scalar>
Var<Scalar> gather_rows(const Var<Scalar>& a, std::vector<Eigen::Index> rows) {
  Matrix<Scalar> v(static_cast<Eigen::Index>(rows.size()), a.cols());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    detail::require(rows[k] >= 0 && rows[k] < a.rows(), "gather_rows", "row out of range");
    v.row(static_cast<Eigen::Index>(k)) = a.value().row(rows[k]);
  }
  return a.tape().record(std::move(v), {a}, [a, rows](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    Matrix<Scalar> ga = Matrix<Scalar>::Zero(a.rows(), a.cols());
    for (std::size_t k = 0; k < rows.size(); ++k) ga.row(rows[k]) += g.row(static_cast<Eigen::Index>(k));
    t.accumulate(a, ga);
  });
}

// out(r) = a(r, cols[r]); rows x 1.
template <typename Scalar>
Var<Scalar> pick_cols(const Var<Scalar>& a, std::vector<Eigen::Index> cols) {
  detail::require(static_cast<Eigen::Index>(cols.size()) == a.rows(), "pick_cols", "one index per row");
  Matrix<Scalar> v(a.rows(), 1);
  for (Eigen::Index r = 0; r < a.rows(); ++r) {
    detail::require(cols[r] >= 0 && cols[r] < a.cols(), "pick_cols", "column out of range");
    v(r, 0) = a.value()(r, cols[r]);
  }
  return a.tape().record(std::move(v), {a}, [a, cols](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    Matrix<Scalar> ga = Matrix<Scalar>::Zero(a.rows(), a.cols());
    for (Eigen::Index r = 0; r < a.rows(); ++r) ga(r, cols[r]) = g(r, 0);
    t.accumulate(a, ga);
  });
}

// Per-row vector-matrix product: row b of `w` holds an (n x k) matrix in
// row-major order; out(b) = x(b) * W_b. Shapes: x B x n, w B x (n*k) -> B x k.
template <typename Scalar>
Var<Scalar> batched_vecmat(const Var<Scalar>& x, const Var<Scalar>& w, Eigen::Index k) {
  const auto B = x.rows();
  const auto n = x.cols();
  detail::require(w.rows() == B && w.cols() == n * k, "batched_vecmat", "weight block shape mismatch");
  Matrix<Scalar> v = Matrix<Scalar>::Zero(B, k);
  for (Eigen::Index b = 0; b < B; ++b) {
    for (Eigen::Index i = 0; i < n; ++i) v.row(b) += x.value()(b, i) * w.value().block(b, i * k, 1, k);
  }
  return x.tape().record(std::move(v), {x, w}, [x, w, k](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    const auto B = x.rows();
    const auto n = x.cols();
    if (t.requires_grad(x.id())) {
      Matrix<Scalar> gx(B, n);
      for (Eigen::Index b = 0; b < B; ++b) {
        for (Eigen::Index i = 0; i < n; ++i) gx(b, i) = w.value().block(b, i * k, 1, k).row(0).dot(g.row(b));
      }
      t.accumulate(x, gx);
    }
    if (t.requires_grad(w.id())) {
      Matrix<Scalar> gw(B, n * k);
      for (Eigen::Index b = 0; b < B; ++b) {
        for (Eigen::Index i = 0; i < n; ++i) gw.block(b, i * k, 1, k) = x.value()(b, i) * g.row(b);
      }
      t.accumulate(w, gw);
    }
  });
}

// Row-wise dot products of equally shaped inputs; rows x 1.
template <typename Scalar>
Var<Scalar> rowwise_dot(const Var<Scalar>& a, const Var<Scalar>& b) {
  detail::same_shape(a, b, "rowwise_dot");
  Matrix<Scalar> v = a.value().cwiseProduct(b.value()).rowwise().sum();
  return a.tape().record(std::move(v), {a, b}, [a, b](Tape<Scalar>& t, std::size_t self) {
    const auto& g = t.grad(self);
    if (t.requires_grad(a.id())) t.accumulate(a, (b.value().array().colwise() * g.col(0).array()).matrix());
    if (t.requires_grad(b.id())) t.accumulate(b, (a.value().array().colwise() * g.col(0).array()).matrix());
  });
}

// Weighted sum of squared differences against a constant target:
//   sum_{r,c} weight(r) * (a(r,c) - target(r,c))^2 / normalizer
template <typename Scalar>
Var<Scalar> weighted_sse(const Var<Scalar>& a, std::type_identity_t<Matrix<Scalar>> target,
                         std::type_identity_t<Vector<Scalar>> row_weight, std::type_identity_t<Scalar> normalizer) {
  detail::require(target.rows() == a.rows() && target.cols() == a.cols(), "weighted_sse", "target shape");
  detail::require(row_weight.size() == a.rows(), "weighted_sse", "one weight per row");
  detail::require(normalizer > Scalar(0), "weighted_sse", "normalizer must be positive");
  Matrix<Scalar> diff = a.value() - target;
  Matrix<Scalar> v(1, 1);
  v(0, 0) = (diff.array().square().colwise() * row_weight.array()).sum() / normalizer;
  return a.tape().record(std::move(v), {a},
                         [a, diff = std::move(diff), row_weight, normalizer](Tape<Scalar>& t, std::size_t self) {
                           const Scalar g = t.grad(self)(0, 0);
                           t.accumulate(a, (diff.array().colwise() * row_weight.array()).matrix() *
                                               (Scalar(2) * g / normalizer));
                         });
}

// Single-head scaled dot-product attention over B stacked sequences of
// length T (rows b*T .. b*T+T-1). Keys at positions >= lengths[b] are
// masked; with `causal`, query p only sees keys 0..p. Query rows past the
// valid length still attend (to valid keys only) so shapes stay dense.
template <typename Scalar>
Var<Scalar> masked_attention(const Var<Scalar>& q, const Var<Scalar>& k, const Var<Scalar>& v,
                             Eigen::Index T, std::vector<Eigen::Index> lengths, bool causal) {
  detail::same_shape(q, k, "masked_attention");
  detail::require(v.rows() == q.rows(), "masked_attention", "value rows");
  detail::require(T > 0 && q.rows() % T == 0, "masked_attention", "rows must be a multiple of T");
  const auto B = q.rows() / T;
  detail::require(static_cast<Eigen::Index>(lengths.size()) == B, "masked_attention", "one length per sequence");
  const Scalar scale = Scalar(1) / std::sqrt(static_cast<Scalar>(q.cols()));

  // Attention weights per sequence, stacked (B*T) x T.
  Matrix<Scalar> weights = Matrix<Scalar>::Zero(B * T, T);
  Matrix<Scalar> out(q.rows(), v.cols());
  for (Eigen::Index b = 0; b < B; ++b) {
    const auto len = lengths[b];
    detail::require(len >= 1 && len <= T, "masked_attention", "sequence length out of range");
    auto qb = q.value().middleRows(b * T, T);
    auto kb = k.value().middleRows(b * T, T);
    Matrix<Scalar> s = (qb * kb.transpose()) * scale;
    for (Eigen::Index p = 0; p < T; ++p) {
      const Eigen::Index visible = causal ? std::min(p + 1, len) : len;
      const Scalar mx = s.row(p).head(visible).maxCoeff();
      Scalar z = 0;
      for (Eigen::Index j = 0; j < visible; ++j) {
        const Scalar e = std::exp(s(p, j) - mx);
        weights(b * T + p, j) = e;
        z += e;
      }
      weights.row(b * T + p).head(visible) /= z;
    }
    out.middleRows(b * T, T) = weights.middleRows(b * T, T) * v.value().middleRows(b * T, T);
  }
  return q.tape().record(
      std::move(out), {q, k, v},
      [q, k, v, T, B, scale, weights = std::move(weights)](Tape<Scalar>& t, std::size_t self) {
        const auto& g = t.grad(self);
        Matrix<Scalar> gq = Matrix<Scalar>::Zero(q.rows(), q.cols());
        Matrix<Scalar> gk = Matrix<Scalar>::Zero(k.rows(), k.cols());
        Matrix<Scalar> gv = Matrix<Scalar>::Zero(v.rows(), v.cols());
        for (Eigen::Index b = 0; b < B; ++b) {
          auto w = weights.middleRows(b * T, T);
          auto gb = g.middleRows(b * T, T);
          gv.middleRows(b * T, T) = w.transpose() * gb;
          Matrix<Scalar> gw = gb * v.value().middleRows(b * T, T).transpose();
          // softmax backward: ds = w * (gw - rowsum(gw * w))
          Matrix<Scalar> ds = w.cwiseProduct(gw);
          Vector<Scalar> dots = ds.rowwise().sum();
          ds -= (w.array().colwise() * dots.array()).matrix();
          ds *= scale;
          gq.middleRows(b * T, T) = ds * k.value().middleRows(b * T, T);
          gk.middleRows(b * T, T) = ds.transpose() * q.value().middleRows(b * T, T);
        }
        t.accumulate(q, gq);
        t.accumulate(k, gk);
        t.accumulate(v, gv);
      });
}

// Row-major reshape (entries read row by row).
template <typename Scalar>
Var<Scalar> reshape(const Var<Scalar>& a, Eigen::Index rows, Eigen::Index cols) {
  detail::require(rows * cols == a.rows() * a.cols(), "reshape", "element count mismatch");
  using RowMat = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
  RowMat src = a.value();
  Matrix<Scalar> v = Eigen::Map<const RowMat>(src.data(), rows, cols);
  return a.tape().record(std::move(v), {a}, [a](Tape<Scalar>& t, std::size_t self) {
    RowMat g = t.grad(self);
    t.accumulate(a, Matrix<Scalar>(Eigen::Map<const RowMat>(g.data(), a.rows(), a.cols())));
  });
}

}  // namespace wolfpack::tensor
