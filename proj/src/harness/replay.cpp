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

#include "wolfpack/harness/replay.hpp"

#include "wolfpack/errors.hpp"

namespace wolfpack::harness {

ReplayBuffer::ReplayBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay capacity must be positive");
}

void ReplayBuffer::add(EpisodeRecord record, Eigen::VectorXd labels) {
  if (labels.size() != 0 && labels.size() != record.length()) {
    throw ShapeError("replay labels must have one entry per step");
  }
  if (episodes_.size() == capacity_) episodes_.pop_front();
  episodes_.push_back(StoredEpisode{std::move(record), std::move(labels), next_id_++});
}

std::vector<const StoredEpisode*> ReplayBuffer::sample(int batch, std::mt19937_64& rng) const {
  if (episodes_.empty()) throw DomainError("cannot sample from an empty replay buffer");
  if (batch < 0) throw DomainError("negative batch size");
  std::uniform_int_distribution<std::size_t> pick(0, episodes_.size() - 1);
  std::vector<const StoredEpisode*> out;
  out.reserve(batch);
  for (int b = 0; b < batch; ++b) out.push_back(&episodes_[pick(rng)]);
  return out;
}

}  // namespace wolfpack::harness
