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

#include "wolfpack/harness/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <thread>

#include "wolfpack/errors.hpp"

namespace wolfpack::harness {

using nlohmann::json;

json EvalSummary::to_json() const {
  return {{"attacker", attacker},
          {"k", k},
          {"k_wp", k_wp},
          {"episodes", episodes},
          {"mean_return", mean_return},
          {"std_return", std_return},
          {"mean_attacked_steps", mean_attacked_steps},
          {"min_attacked_steps", min_attacked_steps},
          {"max_attacked_steps", max_attacked_steps},
          {"returns", returns},
          {"attacked_steps", attacked_steps}};
}

EvalSummary evaluate(const Models& victim, const Models& attacker_models, const EvalRequest& req,
                     std::vector<json>* rows) {
  if (req.episodes < 0 || req.k < 0 || req.jobs < 1) throw ConfigError("eval: invalid episodes, k or jobs");
  const env::PredatorPrey env(victim.config.scenario);
  const auto& at = attacker_models.config.attack;

  EpisodeOptions opts;
  opts.epsilon = req.epsilon;
  opts.attacker = req.attacker;
  opts.attack = at;
  if (req.attacker != AttackerKind::kNatural) opts.k = req.k;
  if (req.attacker == AttackerKind::kWolfpack) opts.k_wp = req.k / (at.t_wp + 1);
  opts.trace_step_probs = req.trace_step_probs;

  std::vector<EpisodeOutput> outs(req.episodes);
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (int e = next++; e < req.episodes; e = next++) {
      try {
        EpisodeRngs rngs{make_stream(req.seed, Stream::kExplore, e), make_stream(req.seed, Stream::kAttacker, e),
                         make_stream(req.seed, Stream::kPlanner, e)};
        const auto env_seed = make_stream(req.seed, Stream::kEnv, e)();
        outs[e] = run_episode(env, victim, attacker_models, opts, env_seed, rngs);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!error) error = std::current_exception();
        next = req.episodes;
      }
    }
  };
  const int jobs = std::min(req.jobs, std::max(1, req.episodes));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (error) std::rethrow_exception(error);

  EvalSummary s;
  s.attacker = to_string(req.attacker);
  s.k = opts.k;
  s.k_wp = opts.k_wp;
  s.episodes = req.episodes;
  for (int e = 0; e < req.episodes; ++e) {
    const auto& rec = outs[e].record;
    const int attacked = rec.attacked_steps();
    if (attacked > opts.k) throw InternalError("attacked-step count exceeds the unified budget");
    s.returns.push_back(rec.episode_return);
    s.attacked_steps.push_back(attacked);
    if (rows == nullptr) continue;
    for (const auto& a : rec.attack_log) {
      rows->push_back({{"kind", "attack"},
                       {"phase", "eval"},
                       {"attacker", s.attacker},
                       {"episode", e},
                       {"t", a.step},
                       {"targets", a.targets},
                       {"delta_q", a.delta_q},
                       {"window", a.window_id},
                       {"attack_kind", a.kind}});
    }
    for (const auto& sp : outs[e].step_probs) {
      rows->push_back({{"kind", "stepprob"},
                       {"episode", e},
                       {"t", sp.t},
                       {"T", attacker_models.config.planner.model.temperature},
                       {"p", sp.p},
                       {"fired", sp.fired},
                       {"forced", sp.forced},
                       {"forecast", std::vector<double>(sp.forecast.data(), sp.forecast.data() + sp.forecast.size())}});
    }
  }
  if (!s.returns.empty()) {
    const double N = static_cast<double>(s.returns.size());
    double sum = 0, sq = 0, att = 0;
    for (double r : s.returns) sum += r;
    s.mean_return = sum / N;
    for (double r : s.returns) sq += (r - s.mean_return) * (r - s.mean_return);
    s.std_return = std::sqrt(sq / N);
    for (int a : s.attacked_steps) att += a;
    s.mean_attacked_steps = att / N;
    s.min_attacked_steps = *std::min_element(s.attacked_steps.begin(), s.attacked_steps.end());
    s.max_attacked_steps = *std::max_element(s.attacked_steps.begin(), s.attacked_steps.end());
  }
  if (rows != nullptr) {
    json row = s.to_json();
    row["kind"] = "eval";
    row.erase("returns");
    row.erase("attacked_steps");
    rows->push_back(std::move(row));
  }
  return s;
}

}  // namespace wolfpack::harness
