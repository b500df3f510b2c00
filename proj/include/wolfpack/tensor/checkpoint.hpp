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

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "wolfpack/tensor/param_store.hpp"

// WLF1 checkpoint container:
//
//   offset 0   4 bytes   magic "WLF1"
//   offset 4   8 bytes   manifest length M, little-endian uint64
//   offset 12  M bytes   UTF-8 JSON manifest
//   offset 12+M          blob of little-endian IEEE-754 arrays
//
// Manifest: {"format": "WLF1", "entries": [{"name", "dtype": "f64"|"f32",
// "shape": [rows, cols], "offset", "nbytes"}...], "blob_bytes", "checksum"
// (FNV-1a 64 of the blob, hex), "meta": {...}}. Arrays are row-major.
namespace wolfpack::tensor {

enum class StoredType { kF64, kF32 };

struct CheckpointEntry {
  std::string name;
  Matrix<double> value;
};

struct Checkpoint {
  nlohmann::json meta = nlohmann::json::object();
  std::vector<CheckpointEntry> entries;

  const CheckpointEntry* find(const std::string& name) const;
};

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size);

std::vector<std::uint8_t> encode_checkpoint(const std::vector<const ParamStore<double>*>& stores,
                                            const nlohmann::json& meta, StoredType dtype = StoredType::kF64);

// Throws LoadError on bad magic, truncation, checksum or manifest errors.
Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes);

void save_checkpoint(const std::string& path, const std::vector<const ParamStore<double>*>& stores,
                     const nlohmann::json& meta, StoredType dtype = StoredType::kF64);

Checkpoint load_checkpoint(const std::string& path);

// Copies every entry of `store` from the checkpoint. All names and shapes
// are validated first; on mismatch a LoadError is thrown and `store` is left
// untouched.
void assign_from(const Checkpoint& ckpt, ParamStore<double>& store);

}  // namespace wolfpack::tensor
