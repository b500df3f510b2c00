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

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <json.hpp>

#include "wolfpack/errors.hpp"
#include "wolfpack/harness/config.hpp"
#include "wolfpack/harness/evaluate.hpp"
#include "wolfpack/harness/metrics.hpp"
#include "wolfpack/harness/runner.hpp"
#include "wolfpack/harness/sweep.hpp"
#include "wolfpack/harness/trainer.hpp"

namespace {

using nlohmann::json;
using namespace wolfpack::harness;

int run_train(const std::string& config_path, std::uint64_t seed, const std::string& out, bool verbose) {
  auto config = load_config(config_path);
  for (const auto& w : config.validate()) std::cerr << "warning: " << w << "\n";
  std::filesystem::create_directories(out);
  std::ofstream(std::filesystem::path(out) / "config.json") << to_json(config).dump(2) << '\n';
  MetricsWriter metrics((std::filesystem::path(out) / "metrics.jsonl").string());
  TrainOptions opt;
  opt.out_dir = out;
  opt.run_id = std::filesystem::path(out).filename().string() + "/seed_" + std::to_string(seed);
  opt.metrics = &metrics;
  if (verbose) {
    opt.on_row = [](const json& row) {
      if (row.value("kind", "") != "train") return;
      std::cerr << row["phase"].get<std::string>() << " step " << row["step"] << " return_mean100 "
                << row["return_mean100"] << " td_loss " << row["td_loss"] << "\n";
    };
  }
  auto result = train(config, seed, opt);
  std::cout << json{{"vanilla_checkpoint", result.vanilla_checkpoint},
                    {"final_checkpoint", result.final_checkpoint},
                    {"env_steps", result.env_steps},
                    {"episodes", result.episodes},
                    {"return_mean100", result.mean_return_last100}}
                   .dump()
            << "\n";
  return 0;
}

int run_eval(const std::string& checkpoint, const std::string& attacker, int episodes, int k, std::uint64_t seed,
             double epsilon, int jobs, const std::string& attacker_checkpoint, const std::string& metrics_path,
             bool step_probs) {
  json meta;
  const auto victim = load_models(checkpoint, &meta);
  std::unique_ptr<Models> foreign;
  if (!attacker_checkpoint.empty()) {
    foreign = std::make_unique<Models>(load_models(attacker_checkpoint));
    require_compatible(*foreign, victim.config.scenario);
  }
  EvalRequest req;
  req.attacker = parse_attacker(attacker);
  req.episodes = episodes;
  req.k = k;
  req.seed = seed;
  req.epsilon = epsilon;
  req.jobs = jobs;
  req.trace_step_probs = step_probs;
  std::vector<json> rows;
  const auto summary = evaluate(victim, foreign ? *foreign : victim, req, &rows);
  if (!metrics_path.empty()) {
    for (auto& r : rows) {
      r["run"] = checkpoint;
      r["seed"] = seed;
      r["step"] = meta.value("env_steps", 0L);
    }
    MetricsWriter(metrics_path).write_all(std::move(rows));
  }
  auto out = summary.to_json();
  out["checkpoint"] = checkpoint;
  out["seed"] = seed;
  std::cout << out.dump() << "\n";
  return 0;
}

int run_sweep(const std::string& config_path, const std::string& grid_path, const std::string& out, int jobs) {
  const auto config = load_config(config_path);
  std::ifstream in(grid_path);
  if (!in) throw wolfpack::ConfigError("cannot open grid file: " + grid_path);
  json grid;
  try {
    in >> grid;
  } catch (const json::exception& e) {
    throw wolfpack::ConfigError("grid " + grid_path + ": " + e.what());
  }
  SweepOptions opt;
  opt.out_dir = out;
  opt.jobs = jobs;
  opt.quiet = false;
  for (const auto& row : sweep(config, grid, opt)) std::cout << row.dump() << "\n";
  return 0;
}

int run_export(const std::string& metrics, const std::string& what, const std::string& format,
               const std::string& out) {
  const auto text = export_rows(read_metrics_dir(metrics), parse_export_what(what), format);
  if (out.empty()) {
    std::cout << text;
  } else {
    std::ofstream(out) << text;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Wolfpack adversarial attack and robust training on predator-prey"};
  app.require_subcommand(1);

  std::string config_path, out, checkpoint, attacker = "natural", grid_path, metrics, what, format = "jsonl",
                                          attacker_checkpoint, metrics_out, export_out;
  std::uint64_t seed = 1;
  int episodes = 100, k = 4, jobs = 1;
  double epsilon = 0.0;
  bool verbose = false, step_probs = false;

  auto* train_cmd = app.add_subcommand("train", "pretrain then adversarially train one run");
  train_cmd->add_option("--config", config_path, "run config (JSON)")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--seed", seed, "run seed");
  train_cmd->add_option("--out", out, "output directory")->required();
  train_cmd->add_flag("-v,--verbose", verbose, "print training progress");

  auto* eval_cmd = app.add_subcommand("eval", "evaluate a checkpoint under an attacker");
  eval_cmd->add_option("--checkpoint", checkpoint, "checkpoint file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--attacker", attacker, "attacker")
      ->check(CLI::IsMember({"natural", "random", "wolfpack"}));
  eval_cmd->add_option("--episodes", episodes, "evaluation episodes")->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--k", k, "unified attacked-step budget")->check(CLI::NonNegativeNumber);
  eval_cmd->add_option("--seed", seed, "evaluation seed");
  eval_cmd->add_option("--epsilon", epsilon, "exploration during evaluation")->check(CLI::Range(0.0, 1.0));
  eval_cmd->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--attacker-checkpoint", attacker_checkpoint, "networks driving the attacker")
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--metrics", metrics_out, "append evaluation rows to this JSONL file");
  eval_cmd->add_flag("--step-probs", step_probs, "log per-step attack probabilities");

  auto* sweep_cmd = app.add_subcommand("sweep", "train and evaluate every cell of a config grid");
  sweep_cmd->add_option("--config", config_path, "base run config")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--grid", grid_path, "grid (JSON object of value lists)")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--out", out, "output directory")->required();
  sweep_cmd->add_option("--jobs", jobs, "concurrent runs")->check(CLI::PositiveNumber);

  auto* export_cmd = app.add_subcommand("export", "extract metrics rows");
  export_cmd->add_option("--metrics", metrics, "metrics directory or file")->required();
  export_cmd->add_option("--what", what, "row selection")
      ->required()
      ->check(CLI::IsMember({"curves", "attacks", "stepprobs"}));
  export_cmd->add_option("--format", format, "output format")->check(CLI::IsMember({"jsonl", "csv"}));
  export_cmd->add_option("--out", export_out, "output file (default stdout)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) return run_train(config_path, seed, out, verbose);
    if (*eval_cmd) {
      return run_eval(checkpoint, attacker, episodes, k, seed, epsilon, jobs, attacker_checkpoint, metrics_out,
                      step_probs);
    }
    if (*sweep_cmd) return run_sweep(config_path, grid_path, out, jobs);
    if (*export_cmd) return run_export(metrics, what, format, export_out);
  } catch (const wolfpack::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const wolfpack::LoadError& e) {
    std::cerr << "load error: " << e.what() << "\n";
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
