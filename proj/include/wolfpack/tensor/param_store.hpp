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
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "wolfpack/errors.hpp"

namespace wolfpack::tensor {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

// Named, shaped parameter arrays with paired gradient buffers. Entries keep
// insertion order, which fixes the checkpoint layout.
template <typename Scalar>
class ParamStore {
 public:
  struct Entry {
    std::string name;
    Matrix<Scalar> value;
    Matrix<Scalar> grad;
  };

  Entry& add(std::string name, Matrix<Scalar> value) {
    if (index_.count(name) != 0) {
      throw ConfigError("duplicate parameter name: " + name);
    }
    index_.emplace(name, entries_.size());
    Matrix<Scalar> grad = Matrix<Scalar>::Zero(value.rows(), value.cols());
    entries_.push_back(Entry{std::move(name), std::move(value), std::move(grad)});
    return entries_.back();
  }

  bool contains(const std::string& name) const { return index_.count(name) != 0; }

  Entry& at(const std::string& name) { return entries_[lookup(name)]; }
  const Entry& at(const std::string& name) const { return entries_[lookup(name)]; }

  std::vector<Entry>& entries() { return entries_; }
  const std::vector<Entry>& entries() const { return entries_; }

  std::size_t size() const { return entries_.size(); }

  Eigen::Index scalar_count() const {
    Eigen::Index n = 0;
    for (const auto& e : entries_) n += e.value.size();
    return n;
  }

  void zero_grad() {
    for (auto& e : entries_) e.grad.setZero();
  }

  // True when both stores hold the same names with the same shapes, in order.
  bool same_layout(const ParamStore& other) const {
    if (entries_.size() != other.entries_.size()) return false;
    for (std::size_t k = 0; k < entries_.size(); ++k) {
      const auto& a = entries_[k];
      const auto& b = other.entries_[k];
      if (a.name != b.name || a.value.rows() != b.value.rows() ||
          a.value.cols() != b.value.cols()) {
        return false;
      }
    }
    return true;
  }

 private:
  std::size_t lookup(const std::string& name) const {
    auto it = index_.find(name);
    if (it == index_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
  }

  std::vector<Entry> entries_;
  std::unordered_map<std::string, std::size_t> index_;
};

}  // namespace wolfpack::tensor
