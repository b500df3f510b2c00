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

#include <fstream>
#include <mutex>
#include <string>
#include <vector>

#include <json.hpp>

namespace wolfpack::harness {

inline constexpr int kMetricsVersion = 1;

// Append-only JSONL sink. Every row gets "v": kMetricsVersion. Safe to share
// between threads; rows are written whole.
class MetricsWriter {
 public:
  MetricsWriter() = default;
  explicit MetricsWriter(const std::string& path);

  void write(nlohmann::json row);
  void write_all(std::vector<nlohmann::json> rows);

  bool is_open() const { return out_.is_open(); }
  const std::string& path() const { return path_; }

 private:
  std::mutex mutex_;
  std::string path_;
  std::ofstream out_;
};

// Reads every row of a JSONL file. Throws LoadError on malformed lines or a
// schema version other than kMetricsVersion.
std::vector<nlohmann::json> read_metrics(const std::string& path);

// Rows of every *.jsonl under `dir` (recursively, files in sorted order).
std::vector<nlohmann::json> read_metrics_dir(const std::string& dir);

enum class ExportWhat { kCurves, kAttacks, kStepProbs };
ExportWhat parse_export_what(const std::string& s);

// Rows selected by `what`, serialized as JSONL or CSV (header from the union
// of keys in first-seen order; nested values as JSON text).
std::string export_rows(const std::vector<nlohmann::json>& rows, ExportWhat what, const std::string& format);

}  // namespace wolfpack::harness
