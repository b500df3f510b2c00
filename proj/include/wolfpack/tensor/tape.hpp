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

#include <cstddef>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "wolfpack/errors.hpp"
#include "wolfpack/tensor/param_store.hpp"

namespace wolfpack::tensor {

template <typename Scalar>
class Tape;

// Handle to a node on a Tape. Cheap to copy; valid as long as the tape lives.
template <typename Scalar>
class Var {
 public:
  Var() = default;
  Var(Tape<Scalar>* tape, std::size_t id) : tape_(tape), id_(id) {}

  const Matrix<Scalar>& value() const { return tape_->value(id_); }
  Eigen::Index rows() const { return value().rows(); }
  Eigen::Index cols() const { return value().cols(); }
  Tape<Scalar>& tape() const { return *tape_; }
  std::size_t id() const { return id_; }
  bool valid() const { return tape_ != nullptr; }

 private:
  Tape<Scalar>* tape_ = nullptr;
  std::size_t id_ = 0;
};

// Reverse-mode recorder. Nodes are appended in evaluation order, so the
// reverse of insertion order is a valid topological order for backward.
//
// A tape constructed with `recording == false` keeps values only; it is
// used for target networks and inference where no gradient is needed.
template <typename Scalar>
class Tape {
 public:
  using Mat = Matrix<Scalar>;
  using BackwardFn = std::function<void(Tape&, std::size_t)>;

  explicit Tape(bool recording = true) : recording_(recording) {}

  Tape(const Tape&) = delete;
  Tape& operator=(const Tape&) = delete;

  bool recording() const { return recording_; }

  Var<Scalar> constant(Mat value) { return push(std::move(value), false, {}); }

  // Leaf whose gradient is kept on the tape and readable through grad().
  Var<Scalar> input(Mat value) { return push(std::move(value), recording_, {}); }

  // Trainable parameter: backward accumulates into the store's grad buffer.
  Var<Scalar> param(ParamStore<Scalar>& store, const std::string& name) {
    auto* entry = &store.at(name);
    if (!recording_) return constant(entry->value);
    return push(entry->value, true, [entry](Tape& t, std::size_t self) {
      entry->grad += t.grad(self);
    });
  }

  // Frozen parameter.
  Var<Scalar> param(const ParamStore<Scalar>& store, const std::string& name) {
    return constant(store.at(name).value);
  }

  // Records an operation. `fn` reads grad(self) and accumulates into parents.
  template <typename Fn>
  Var<Scalar> record(Mat value, std::initializer_list<Var<Scalar>> parents, Fn&& fn) {
    bool needs = false;
    if (recording_) {
      for (const auto& p : parents) needs = needs || nodes_[p.id()].requires_grad;
    }
    return push(std::move(value), needs, needs ? BackwardFn(std::forward<Fn>(fn)) : BackwardFn{});
  }

  template <typename Fn>
  Var<Scalar> record(Mat value, const std::vector<Var<Scalar>>& parents, Fn&& fn) {
    bool needs = false;
    if (recording_) {
      for (const auto& p : parents) needs = needs || nodes_[p.id()].requires_grad;
    }
    return push(std::move(value), needs, needs ? BackwardFn(std::forward<Fn>(fn)) : BackwardFn{});
  }

  const Mat& value(std::size_t id) const { return nodes_[id].value; }

  bool requires_grad(std::size_t id) const { return nodes_[id].requires_grad; }

  // Gradient of the last backward root w.r.t. node `id` (zeros if untouched).
  const Mat& grad(std::size_t id) {
    auto& n = nodes_[id];
    if (n.grad.size() == 0) n.grad = Mat::Zero(n.value.rows(), n.value.cols());
    return n.grad;
  }

  template <typename Derived>
  void accumulate(std::size_t id, const Eigen::MatrixBase<Derived>& g) {
    auto& n = nodes_[id];
    if (!n.requires_grad) return;
    if (n.grad.size() == 0) {
      n.grad = g;
    } else {
      n.grad += g;
    }
    n.touched = true;
  }

  template <typename Derived>
  void accumulate(const Var<Scalar>& v, const Eigen::MatrixBase<Derived>& g) {
    accumulate(v.id(), g);
  }

  // Runs reverse accumulation from a 1x1 root.
  void backward(const Var<Scalar>& root) {
    if (root.rows() != 1 || root.cols() != 1) {
      throw ShapeError("backward root must be 1x1");
    }
    if (!recording_) throw InternalError("backward on a non-recording tape");
    for (auto& n : nodes_) {
      n.grad.resize(0, 0);
      n.touched = false;
    }
    visits_ = 0;
    auto& r = nodes_[root.id()];
    if (!r.requires_grad) return;
    r.grad = Mat::Constant(1, 1, Scalar(1));
    r.touched = true;
    for (std::size_t k = root.id() + 1; k-- > 0;) {
      auto& n = nodes_[k];
      if (!n.touched || !n.requires_grad) continue;
      ++visits_;
      if (n.fn) n.fn(*this, k);
    }
  }

  std::size_t size() const { return nodes_.size(); }

  // Number of nodes whose backward step ran during the last backward().
  std::size_t backward_visits() const { return visits_; }

 private:
  struct Node {
    Mat value;
    Mat grad;
    bool requires_grad = false;
    bool touched = false;
    BackwardFn fn;
  };

  Var<Scalar> push(Mat value, bool requires_grad, BackwardFn fn) {
    nodes_.push_back(Node{std::move(value), Mat(), requires_grad, false, std::move(fn)});
    return Var<Scalar>(this, nodes_.size() - 1);
  }

  bool recording_;
  std::vector<Node> nodes_;
  std::size_t visits_ = 0;
};

}  // namespace wolfpack::tensor
