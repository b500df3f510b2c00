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

#include "wolfpack/harness/metrics.hpp"

#include <algorithm>
#include <filesystem>
#include <sstream>

#include "wolfpack/errors.hpp"

namespace wolfpack::harness {

using nlohmann::json;

MetricsWriter::MetricsWriter(const std::string& path) : path_(path), out_(path, std::ios::app) {
  if (!out_) throw ConfigError("cannot open metrics file: " + path);
}

void MetricsWriter::write(json row) {
  row["v"] = kMetricsVersion;
  const std::string line = row.dump();
  std::lock_guard<std::mutex> lock(mutex_);
  if (!out_.is_open()) return;
  out_ << line << '\n';
  out_.flush();
}

void MetricsWriter::write_all(std::vector<json> rows) {
  std::string text;
  for (auto& row : rows) {
    row["v"] = kMetricsVersion;
    text += row.dump();
    text += '\n';
  }
  std::lock_guard<std::mutex> lock(mutex_);
  if (!out_.is_open()) return;
  out_ << text;
  out_.flush();
}

std::vector<json> read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open metrics file: " + path);
  std::vector<json> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    json row;
    try {
      row = json::parse(line);
    } catch (const json::exception& e) {
      throw LoadError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!row.is_object() || row.value("v", 0) != kMetricsVersion) {
      throw LoadError(path + ":" + std::to_string(lineno) + ": unsupported metrics schema");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<json> read_metrics_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (fs::is_regular_file(dir)) return read_metrics(dir);
  if (!fs::is_directory(dir)) throw LoadError("no such metrics directory: " + dir);
  std::vector<std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".jsonl") files.push_back(e.path().string());
  }
  std::sort(files.begin(), files.end());
  std::vector<json> rows;
  for (const auto& f : files) {
    auto part = read_metrics(f);
    rows.insert(rows.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return rows;
}

ExportWhat parse_export_what(const std::string& s) {
  if (s == "curves") return ExportWhat::kCurves;
  if (s == "attacks") return ExportWhat::kAttacks;
  if (s == "stepprobs") return ExportWhat::kStepProbs;
  throw ConfigError("unknown export selection: " + s);
}

namespace {

bool selected(const json& row, ExportWhat what) {
  const std::string kind = row.value("kind", "");
  switch (what) {
    case ExportWhat::kCurves:
      return kind == "train" || kind == "eval";
    case ExportWhat::kAttacks:
      return kind == "attack";
    case ExportWhat::kStepProbs:
      return kind == "stepprob";
  }
  return false;
}

std::string csv_cell(const json& v) {
  std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

std::string export_rows(const std::vector<json>& rows, ExportWhat what, const std::string& format) {
  if (format != "jsonl" && format != "csv") throw ConfigError("unknown export format: " + format);
  std::vector<const json*> keep;
  for (const auto& r : rows) {
    if (selected(r, what)) keep.push_back(&r);
  }
  std::ostringstream os;
  if (format == "jsonl") {
    for (const auto* r : keep) os << r->dump() << '\n';
    return os.str();
  }
  std::vector<std::string> header;
  for (const auto* r : keep) {
    for (const auto& item : r->items()) {
      if (std::find(header.begin(), header.end(), item.key()) == header.end()) header.push_back(item.key());
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c) os << (c ? "," : "") << csv_cell(header[c]);
  os << '\n';
  for (const auto* r : keep) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c) os << ',';
      if (r->contains(header[c])) os << csv_cell(r->at(header[c]));
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace wolfpack::harness
