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

#include "wolfpack/harness/runner.hpp"

#include <algorithm>
#include <optional>
#include <sstream>

#include "wolfpack/attack/wolfpack.hpp"
#include "wolfpack/errors.hpp"
#include "wolfpack/learner/control.hpp"
#include "wolfpack/planner/rollout.hpp"
#include "wolfpack/planner/step.hpp"
#include "wolfpack/tensor/checkpoint.hpp"

namespace wolfpack::harness {

std::mt19937_64 make_stream(std::uint64_t seed, Stream stream, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(index),
                    static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

namespace {

learner::AgentNetConfig agent_config(const RunConfig& c) {
  learner::AgentNetConfig a;
  a.obs_dim = c.scenario.obs_dim();
  a.n_agents = c.scenario.n_predators;
  a.n_actions = env::kNumActions;
  a.hidden = c.train.hidden;
  return a;
}

learner::MixerConfig mixer_config(const RunConfig& c) {
  auto m = c.mixer;
  m.n_agents = c.scenario.n_predators;
  m.state_dim = c.scenario.state_dim();
  return m;
}

}  // namespace

Models::Models(const RunConfig& c)
    : config(c),
      agent(agent_config(c)),
      mixer(mixer_config(c)),
      planning(c.planner.model, c.scenario.state_dim(), c.scenario.n_predators, c.scenario.obs_dim(),
               env::kNumActions),
      qdiff(c.planner.model, c.scenario.state_dim()) {}

void Models::init(std::uint64_t seed) {
  auto rng = make_stream(seed, Stream::kInit);
  agent.init(params, rng);
  mixer.init(params, rng);
  planning.init(planning_params, rng);
  qdiff.init(qdiff_params, rng);
}

nlohmann::json checkpoint_meta(const Models& models, std::uint64_t seed, const std::string& phase, long env_steps,
                               long episodes) {
  return {{"kind", "wolfpack-run"},
          {"config", to_json(models.config)},
          {"seed", seed},
          {"phase", phase},
          {"env_steps", env_steps},
          {"episodes", episodes}};
}

void save_models(const std::string& path, const Models& models, const nlohmann::json& meta) {
  tensor::save_checkpoint(path, {&models.params, &models.planning_params, &models.qdiff_params}, meta);
}

Models load_models(const std::string& path, nlohmann::json* meta) {
  auto ckpt = tensor::load_checkpoint(path);
  if (!ckpt.meta.contains("config")) throw LoadError(path + ": checkpoint carries no run config");
  RunConfig config;
  try {
    config = parse_config(ckpt.meta.at("config"));
  } catch (const ConfigError& e) {
    throw LoadError(path + ": embedded config is invalid: " + e.what());
  }
  Models models(config);
  models.init(0);
  tensor::assign_from(ckpt, models.params);
  tensor::assign_from(ckpt, models.planning_params);
  tensor::assign_from(ckpt, models.qdiff_params);
  if (meta != nullptr) *meta = ckpt.meta;
  return models;
}

void require_compatible(const Models& models, const env::ScenarioSpec& scenario) {
  const auto& s = models.config.scenario;
  if (s.n_predators != scenario.n_predators || s.obs_dim() != scenario.obs_dim()) {
    std::ostringstream os;
    os << "checkpoint dimensions (agents " << s.n_predators << ", obs " << s.obs_dim()
       << ") do not match the scenario (agents " << scenario.n_predators << ", obs " << scenario.obs_dim() << ")";
    throw ShapeError(os.str());
  }
}

AttackerKind parse_attacker(const std::string& s) {
  if (s == "natural") return AttackerKind::kNatural;
  if (s == "random") return AttackerKind::kRandom;
  if (s == "wolfpack") return AttackerKind::kWolfpack;
  throw ConfigError("unknown attacker: " + s);
}

std::string to_string(AttackerKind kind) {
  switch (kind) {
    case AttackerKind::kNatural:
      return "natural";
    case AttackerKind::kRandom:
      return "random";
    case AttackerKind::kWolfpack:
      return "wolfpack";
  }
  return "?";
}

EpisodeOutput run_episode(const env::PredatorPrey& env, const Models& victim, const Models& attacker_models,
                          const EpisodeOptions& options, std::uint64_t env_seed, EpisodeRngs& rngs) {
  const int n = env.n_agents();
  const int A = env::kNumActions;
  const int limit = env.spec().episode_limit;
  const bool shared = &victim == &attacker_models;
  require_compatible(victim, env.spec());
  if (!shared) require_compatible(attacker_models, env.spec());
  const auto& cfg = options.attack;
  const int W = attacker_models.config.planner.model.window;

  EpisodeOutput out;
  auto& rec = out.record;
  rec.n_agents = n;
  rec.obs_dim = env.obs_dim();
  rec.states.resize(limit + 1, env.state_dim());
  rec.actions.resize(limit, n);
  rec.original_actions.resize(limit, n);
  rec.attacked = Eigen::MatrixXi::Zero(limit, n);
  rec.rewards.resize(limit);
  rec.done.resize(limit);

  auto world = env.reset(env_seed);
  Eigen::MatrixXd h = victim.agent.initial_hidden(n);
  Eigen::MatrixXd h_att = attacker_models.agent.initial_hidden(n);
  std::vector<int> last(n, -1);

  auto schedule = attack::AttackSchedule::start(options.k, options.k_wp);
  std::optional<attack::RandomAttacker> random_attacker;
  std::vector<int> random_starts;
  if (options.attacker == AttackerKind::kRandom) {
    random_attacker.emplace(options.k, limit, n, A, rngs.attacker);
  } else if (options.attacker == AttackerKind::kWolfpack && cfg.step == attack::StepMode::kRandom) {
    random_starts = planner::random_step_select(rngs.attacker, options.k_wp, limit, cfg.t_wp);
  }

  int t = 0;
  for (; t < limit; ++t) {
    const Eigen::MatrixXd obs = env.joint_observations(world);
    const Eigen::VectorXd state = env.global_state(world);
    rec.states.row(t) = state.transpose();
    if (options.keep_hiddens) out.hiddens.push_back(h);
    if (options.keep_worlds) out.worlds.push_back(world);

    auto qv = victim.agent.agent_q(victim.params, obs, last, h);
    qv.check();
    std::vector<int> a(n);
    for (int i = 0; i < n; ++i) a[i] = learner::select_action(qv.q.row(i).transpose(), options.epsilon, rngs.explore);

    learner::QOutput qa;
    if (!shared) qa = attacker_models.agent.agent_q(attacker_models.params, obs, last, h_att);
    const Eigen::MatrixXd& q_att = shared ? qv.q : qa.q;
    const attack::QContext ctx{attacker_models.mixer, attacker_models.params, q_att, state};

    attack::AttackStep step;
    if (options.attacker == AttackerKind::kWolfpack) {
      bool fire = false;
      if (schedule.can_open()) {
        if (cfg.step == attack::StepMode::kPlanner) {
          const int k0 = std::max(0, t + 1 - W);
          Eigen::VectorXd forecast =
              attacker_models.qdiff.predict(attacker_models.qdiff_params, rec.states.middleRows(k0, t + 1 - k0));
          const double p = planner::attack_probability(forecast, attacker_models.config.planner.model.temperature);
          fire = planner::sample_init(p, rngs.planner, schedule);
          bool forced = false;
          if (!fire && cfg.force_deadline && planner::deadline_reached(t, limit, schedule, cfg.t_wp)) {
            fire = forced = true;
          }
          if (options.trace_step_probs) out.step_probs.push_back({t, p, fire, forced, std::move(forecast)});
        } else {
          fire = std::binary_search(random_starts.begin(), random_starts.end(), t);
        }
      }
      step = attack::wolfpack_act(t, ctx, obs, a, schedule, cfg, fire, rngs.attacker);
    } else if (options.attacker == AttackerKind::kRandom) {
      step = random_attacker->act(t, a, rngs.attacker, &ctx);
    } else {
      step.actions = a;
    }

    for (int i = 0; i < n; ++i) {
      rec.original_actions(t, i) = a[i];
      rec.actions(t, i) = step.actions[i];
    }
    const bool deviation_only = cfg.budget == attack::BudgetMode::kDeviationOnly;
    for (int i : step.targets) {
      if (!deviation_only || step.actions[i] != a[i]) rec.attacked(t, i) = 1;
    }
    const auto r = env.step(world, step.actions);
    rec.rewards(t) = r.reward;
    rec.done(t) = r.done ? 1 : 0;
    rec.episode_return += r.reward;
    h = qv.hidden;
    if (!shared) h_att = qa.hidden;
    last = step.actions;
    if (r.done) {
      ++t;
      break;
    }
  }
  rec.states.row(t) = env.global_state(world).transpose();
  rec.states.conservativeResize(t + 1, Eigen::NoChange);
  rec.actions.conservativeResize(t, Eigen::NoChange);
  rec.original_actions.conservativeResize(t, Eigen::NoChange);
  rec.attacked.conservativeResize(t, Eigen::NoChange);
  rec.rewards.conservativeResize(t);
  rec.done.conservativeResize(t);
  if (options.attacker == AttackerKind::kWolfpack) {
    rec.attack_log = schedule.log;
  } else if (random_attacker) {
    rec.attack_log = random_attacker->log();
  }
  return out;
}

Eigen::VectorXd compute_labels(const env::PredatorPrey& env, const Models& models,
                               const attack::AttackConfig& config, const EpisodeOutput& episode, bool oracle,
                               std::mt19937_64& rng) {
  const auto& rec = episode.record;
  const int T = rec.length();
  if (static_cast<int>(episode.hiddens.size()) < T || (oracle && static_cast<int>(episode.worlds.size()) < T)) {
    throw ShapeError("labelling needs per-step hiddens (and worlds for oracle labels)");
  }
  const int W = models.config.planner.model.window;
  const planner::RolloutPolicy policy{models.agent, models.mixer, models.params};
  Eigen::VectorXd labels(T);
  for (int t = 0; t < T; ++t) {
    auto start = planner::RolloutStart::from_history(rec.states.topRows(t + 1), rec.actions.topRows(t),
                                                     episode.hiddens[t], W, T - t);
    labels(t) = oracle ? planner::oracle_delta_qwp(policy, config, start, env, episode.worlds[t], rng)
                       : planner::plan_delta_qwp(policy, config, start, models.planning, models.planning_params, rng);
  }
  return labels;
}

}  // namespace wolfpack::harness
