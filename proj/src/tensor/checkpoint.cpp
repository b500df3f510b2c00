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

#include "wolfpack/tensor/checkpoint.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <iterator>
#include <sstream>

#include "wolfpack/errors.hpp"

namespace wolfpack::tensor {
namespace {

constexpr char kMagic[4] = {'W', 'L', 'F', '1'};
constexpr std::size_t kHeaderBytes = 12;

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  out.insert(out.end(), raw, raw + sizeof(T));
}

template <typename T>
T get_le(const std::uint8_t* p) {
  std::uint8_t raw[sizeof(T)];
  std::memcpy(raw, p, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) std::reverse(raw, raw + sizeof(T));
  T value;
  std::memcpy(&value, raw, sizeof(T));
  return value;
}

std::string hex64(std::uint64_t v) {
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << v;
  return os.str();
}

}  // namespace

const CheckpointEntry* Checkpoint::find(const std::string& name) const {
  for (const auto& e : entries) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

std::uint64_t fnv1a64(const std::uint8_t* data, std::size_t size) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::vector<std::uint8_t> encode_checkpoint(const std::vector<const ParamStore<double>*>& stores,
                                            const nlohmann::json& meta, StoredType dtype) {
  std::vector<std::uint8_t> blob;
  nlohmann::json entries = nlohmann::json::array();
  const char* dtype_name = dtype == StoredType::kF64 ? "f64" : "f32";
  for (const auto* store : stores) {
    for (const auto& e : store->entries()) {
      const std::size_t offset = blob.size();
      for (Eigen::Index r = 0; r < e.value.rows(); ++r) {
        for (Eigen::Index c = 0; c < e.value.cols(); ++c) {
          if (dtype == StoredType::kF64) {
            put_le<double>(blob, e.value(r, c));
          } else {
            put_le<float>(blob, static_cast<float>(e.value(r, c)));
          }
        }
      }
      entries.push_back({{"name", e.name},
                         {"dtype", dtype_name},
                         {"shape", {e.value.rows(), e.value.cols()}},
                         {"offset", offset},
                         {"nbytes", blob.size() - offset}});
    }
  }
  nlohmann::json manifest = {{"format", "WLF1"},
                             {"entries", entries},
                             {"blob_bytes", blob.size()},
                             {"checksum", hex64(fnv1a64(blob.data(), blob.size()))},
                             {"meta", meta}};
  const std::string text = manifest.dump();
  std::vector<std::uint8_t> out(kMagic, kMagic + 4);
  put_le<std::uint64_t>(out, text.size());
  out.insert(out.end(), text.begin(), text.end());
  out.insert(out.end(), blob.begin(), blob.end());
  return out;
}

Checkpoint decode_checkpoint(const std::vector<std::uint8_t>& bytes) {
  if (bytes.size() < kHeaderBytes || std::memcmp(bytes.data(), kMagic, 4) != 0) {
    throw LoadError("not a WLF1 checkpoint");
  }
  const auto manifest_len = get_le<std::uint64_t>(bytes.data() + 4);
  if (manifest_len > bytes.size() - kHeaderBytes) throw LoadError("truncated checkpoint manifest");
  nlohmann::json manifest;
  try {
    manifest = nlohmann::json::parse(bytes.begin() + kHeaderBytes,
                                     bytes.begin() + static_cast<std::ptrdiff_t>(kHeaderBytes + manifest_len));
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed checkpoint manifest: ") + e.what());
  }
  const std::size_t blob_start = kHeaderBytes + manifest_len;
  try {
    if (manifest.at("format").get<std::string>() != "WLF1") throw LoadError("unsupported checkpoint format");
    const auto blob_bytes = manifest.at("blob_bytes").get<std::size_t>();
    if (bytes.size() - blob_start != blob_bytes) throw LoadError("checkpoint blob size mismatch (truncated?)");
    const std::uint8_t* blob = bytes.data() + blob_start;
    if (manifest.at("checksum").get<std::string>() != hex64(fnv1a64(blob, blob_bytes))) {
      throw LoadError("checkpoint checksum mismatch");
    }
    Checkpoint ckpt;
    ckpt.meta = manifest.at("meta");
    for (const auto& e : manifest.at("entries")) {
      const auto dtype = e.at("dtype").get<std::string>();
      const auto shape = e.at("shape").get<std::vector<Eigen::Index>>();
      const auto offset = e.at("offset").get<std::size_t>();
      const auto nbytes = e.at("nbytes").get<std::size_t>();
      if (shape.size() != 2 || shape[0] < 0 || shape[1] < 0) throw LoadError("bad shape in manifest");
      const std::size_t width = dtype == "f64" ? 8 : dtype == "f32" ? 4 : 0;
      if (width == 0) throw LoadError("unknown dtype " + dtype);
      const std::size_t count = static_cast<std::size_t>(shape[0] * shape[1]);
      if (nbytes != count * width || offset > blob_bytes || nbytes > blob_bytes - offset) {
        throw LoadError("entry " + e.at("name").get<std::string>() + " out of blob range");
      }
      Matrix<double> m(shape[0], shape[1]);
      const std::uint8_t* p = blob + offset;
      for (Eigen::Index r = 0; r < shape[0]; ++r) {
        for (Eigen::Index c = 0; c < shape[1]; ++c) {
          m(r, c) = width == 8 ? get_le<double>(p) : static_cast<double>(get_le<float>(p));
          p += width;
        }
      }
      ckpt.entries.push_back({e.at("name").get<std::string>(), std::move(m)});
    }
    return ckpt;
  } catch (const nlohmann::json::exception& e) {
    throw LoadError(std::string("malformed checkpoint manifest: ") + e.what());
  }
}

void save_checkpoint(const std::string& path, const std::vector<const ParamStore<double>*>& stores,
                     const nlohmann::json& meta, StoredType dtype) {
  const auto bytes = encode_checkpoint(stores, meta, dtype);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw LoadError("cannot open checkpoint for writing: " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw LoadError("failed writing checkpoint: " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open checkpoint: " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return decode_checkpoint(bytes);
}

void assign_from(const Checkpoint& ckpt, ParamStore<double>& store) {
  for (const auto& e : store.entries()) {
    const auto* src = ckpt.find(e.name);
    if (src == nullptr) throw LoadError("checkpoint is missing parameter " + e.name);
    if (src->value.rows() != e.value.rows() || src->value.cols() != e.value.cols()) {
      std::ostringstream os;
      os << "shape mismatch for " << e.name << ": checkpoint " << src->value.rows() << "x" << src->value.cols()
         << ", expected " << e.value.rows() << "x" << e.value.cols();
      throw LoadError(os.str());
    }
  }
  for (auto& e : store.entries()) e.value = ckpt.find(e.name)->value;
}

}  // namespace wolfpack::tensor
