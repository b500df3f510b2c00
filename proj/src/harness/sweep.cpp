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

#include "wolfpack/harness/sweep.hpp"

#include <atomic>
#include <exception>
#include <filesystem>
#include <iostream>
#include <map>
#include <mutex>
#include <thread>

#include "wolfpack/errors.hpp"
#include "wolfpack/harness/evaluate.hpp"
#include "wolfpack/harness/metrics.hpp"
#include "wolfpack/harness/trainer.hpp"

namespace wolfpack::harness {

using nlohmann::json;

namespace {

std::string resolve_key(const std::string& key) {
  static const std::map<std::string, std::string> kShort{
      {"m", "attack.m"},
      {"T", "planner.T"},
      {"K_WP", "attack.K_WP"},
      {"t_WP", "attack.t_WP"},
      {"init_mode", "attack.init_mode"},
      {"followup_mode", "attack.followup_mode"},
      {"step_mode", "attack.step_mode"},
      {"budget_mode", "attack.budget_mode"}};
  auto it = kShort.find(key);
  return it == kShort.end() ? key : it->second;
}

json::json_pointer pointer_for(const std::string& dotted) {
  std::string p;
  std::size_t start = 0;
  while (true) {
    const auto dot = dotted.find('.', start);
    p += "/" + dotted.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return json::json_pointer(p);
}

}  // namespace

std::vector<SweepCell> expand_grid(const RunConfig& base, const json& grid) {
  if (!grid.is_object()) throw ConfigError("grid: expected an object of value lists");
  const json base_json = to_json(base);
  std::vector<std::pair<std::string, json>> axes;
  for (const auto& item : grid.items()) {
    const auto key = resolve_key(item.key());
    if (!base_json.contains(pointer_for(key))) throw ConfigError("grid: unknown config key '" + item.key() + "'");
    if (!item.value().is_array() || item.value().empty()) {
      throw ConfigError("grid: '" + item.key() + "' must be a non-empty list");
    }
    axes.emplace_back(key, item.value());
  }
  std::vector<SweepCell> cells;
  std::vector<std::size_t> idx(axes.size(), 0);
  while (true) {
    SweepCell cell;
    cell.index = static_cast<int>(cells.size());
    cell.assignment = json::object();
    json cj = base_json;
    for (std::size_t a = 0; a < axes.size(); ++a) {
      cell.assignment[axes[a].first] = axes[a].second[idx[a]];
      cj[pointer_for(axes[a].first)] = axes[a].second[idx[a]];
    }
    try {
      cell.config = parse_config(cj);
      cell.config.validate();
    } catch (const ConfigError& e) {
      cell.feasible = false;
      cell.reason = e.what();
    }
    cells.push_back(std::move(cell));
    std::size_t a = axes.size();
    while (a > 0) {
      --a;
      if (++idx[a] < axes[a].second.size()) break;
      idx[a] = 0;
      if (a == 0) return cells;
    }
    if (axes.empty()) return cells;
  }
}

std::vector<json> sweep(const RunConfig& base, const json& grid, const SweepOptions& options) {
  namespace fs = std::filesystem;
  const auto cells = expand_grid(base, grid);
  fs::create_directories(options.out_dir);
  MetricsWriter log((fs::path(options.out_dir) / "sweep.jsonl").string());

  struct Task {
    const SweepCell* cell;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& c : cells) {
    if (!c.feasible) {
      log.write({{"kind", "skip"}, {"cell", c.index}, {"assignment", c.assignment}, {"reason", c.reason}});
      if (!options.quiet) std::cerr << "skipping cell " << c.index << ": " << c.reason << "\n";
      continue;
    }
    for (auto s : c.config.seeds) tasks.push_back({&c, s});
  }

  std::vector<std::vector<json>> results(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        const auto& task = tasks[i];
        const auto& cfg = task.cell->config;
        const auto dir = fs::path(options.out_dir) / ("cell_" + std::to_string(task.cell->index)) /
                         ("seed_" + std::to_string(task.seed));
        fs::create_directories(dir);
        MetricsWriter metrics((dir / "metrics.jsonl").string());
        TrainOptions topt;
        topt.out_dir = dir.string();
        topt.run_id = "cell_" + std::to_string(task.cell->index) + "/seed_" + std::to_string(task.seed);
        topt.tags = {{"cell", task.cell->index}, {"assignment", task.cell->assignment}};
        topt.metrics = &metrics;
        auto trained = train(cfg, task.seed, topt);
        std::vector<json> rows;
        for (const auto& name : cfg.eval.attackers) {
          EvalRequest req;
          req.attacker = parse_attacker(name);
          req.episodes = cfg.eval.episodes;
          req.k = cfg.eval.k;
          // Evaluation episodes use seeds disjoint from training.
          req.seed = task.seed + 0x9e3779b97f4a7c15ULL;
          req.epsilon = cfg.eval.epsilon;
          std::vector<json> eval_rows;
          evaluate(*trained.models, req, &eval_rows);
          for (auto& r : eval_rows) {
            r["run"] = topt.run_id;
            r["seed"] = task.seed;
            r["cell"] = task.cell->index;
            r["assignment"] = task.cell->assignment;
            r["step"] = trained.env_steps;
          }
          rows.push_back(eval_rows.back());
          metrics.write_all(std::move(eval_rows));
        }
        results[i] = std::move(rows);
        if (!options.quiet) {
          std::lock_guard<std::mutex> lock(mutex);
          std::cerr << "finished " << topt.run_id << "\n";
        }
      } catch (...) {
        std::lock_guard<std::mutex> lock(mutex);
        if (!error) error = std::current_exception();
        next = tasks.size();
      }
    }
  };
  const int jobs = std::max(1, std::min<int>(options.jobs, static_cast<int>(tasks.size())));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<json> out;
  for (auto& r : results) out.insert(out.end(), r.begin(), r.end());
  return out;
}

}  // namespace wolfpack::harness
