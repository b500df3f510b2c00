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
#include <deque>
#include <random>
#include <vector>

#include "wolfpack/episode.hpp"

namespace wolfpack::harness {

struct StoredEpisode {
  EpisodeRecord record;
  Eigen::VectorXd labels;  // per-step Q-difference targets, empty when unlabelled
  long id = 0;             // insertion index
};

// FIFO episode buffer with uniform sampling with replacement.
class ReplayBuffer {
 public:
  explicit ReplayBuffer(std::size_t capacity = 5000);

  void add(EpisodeRecord record, Eigen::VectorXd labels = {});

  // Throws DomainError when empty.
  std::vector<const StoredEpisode*> sample(int batch, std::mt19937_64& rng) const;

  std::size_t size() const { return episodes_.size(); }
  std::size_t capacity() const { return capacity_; }
  long total_added() const { return next_id_; }
  const StoredEpisode& at(std::size_t i) const { return episodes_.at(i); }

 private:
  std::size_t capacity_;
  long next_id_ = 0;
  std::deque<StoredEpisode> episodes_;
};

}  // namespace wolfpack::harness
