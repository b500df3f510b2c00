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

#include "wolfpack/harness/config.hpp"

#include <fstream>
#include <set>

#include "wolfpack/errors.hpp"

namespace wolfpack::harness {
namespace {

using nlohmann::json;

class Reader {
 public:
  Reader(const json& j, std::string where) : j_(j), where_(std::move(where)) {
    if (!j_.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <typename T>
  void get(const std::string& key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const std::string& key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!seen_.count(item.key())) throw ConfigError(where_ + ": unknown key '" + item.key() + "'");
    }
  }

 private:
  const json& j_;
  std::string where_;
  std::set<std::string> seen_;
};

void read_physics(const json& j, env::Physics& p) {
  Reader r(j, "scenario.physics");
  r.get("dt", p.dt);
  r.get("damping", p.damping);
  r.get("predator_accel", p.predator_accel);
  r.get("prey_accel", p.prey_accel);
  r.get("predator_max_speed", p.predator_max_speed);
  r.get("prey_max_speed", p.prey_max_speed);
  r.get("predator_radius", p.predator_radius);
  r.get("prey_radius", p.prey_radius);
  r.finish();
}

void read_scenario(const json& j, env::ScenarioSpec& s) {
  Reader r(j, "scenario");
  r.get("n_predators", s.n_predators);
  r.get("n_prey", s.n_prey);
  r.get("n_landmarks", s.n_landmarks);
  r.get("episode_limit", s.episode_limit);
  r.get("reward_per_collision", s.reward_per_collision);
  r.get("seed", s.seed);
  if (const auto* p = r.child("physics")) read_physics(*p, s.physics);
  r.finish();
}

void read_mixer(const json& j, learner::MixerConfig& m) {
  Reader r(j, "mixer");
  std::string kind = learner::to_string(m.kind);
  r.get("kind", kind);
  m.kind = learner::parse_mixer_kind(kind);
  r.get("embed", m.embed);
  r.get("hypernet_layers", m.hypernet_layers);
  r.get("hypernet_embed", m.hypernet_embed);
  r.finish();
}

void read_attack(const json& j, attack::AttackConfig& a) {
  Reader r(j, "attack");
  r.get("K_WP", a.k_wp);
  r.get("t_WP", a.t_wp);
  r.get("m", a.m);
  std::string init = attack::to_string(a.init), follow = attack::to_string(a.followup),
              step = attack::to_string(a.step), budget = attack::to_string(a.budget);
  r.get("init_mode", init);
  r.get("followup_mode", follow);
  r.get("step_mode", step);
  r.get("budget_mode", budget);
  a.init = attack::parse_init_mode(init);
  a.followup = attack::parse_followup_mode(follow);
  a.step = attack::parse_step_mode(step);
  a.budget = attack::parse_budget_mode(budget);
  r.get("alpha_virtual", a.alpha_virtual);
  r.get("kl_temperature", a.kl_temperature);
  r.get("force_deadline", a.force_deadline);
  r.finish();
}

void read_train(const json& j, TrainConfig& t) {
  Reader r(j, "train");
  r.get("total_steps", t.total_steps);
  r.get("pretrain_steps", t.pretrain_steps);
  r.get("lr", t.lr);
  r.get("rms_alpha", t.rms_alpha);
  r.get("rms_eps", t.rms_eps);
  r.get("gamma", t.gamma);
  r.get("buffer_episodes", t.buffer_episodes);
  r.get("batch_size", t.batch_size);
  r.get("train_interval_episodes", t.train_interval_episodes);
  r.get("updates_per_train", t.updates_per_train);
  if (const auto* e = r.child("epsilon")) {
    Reader er(*e, "train.epsilon");
    er.get("start", t.epsilon_start);
    er.get("finish", t.epsilon_finish);
    er.get("anneal_steps", t.epsilon_anneal_steps);
    er.finish();
  }
  r.get("ema_rate", t.ema_rate);
  std::string mode = t.hard_target ? "hard" : "ema";
  r.get("target_update", mode);
  if (mode != "ema" && mode != "hard") throw ConfigError("train.target_update: expected \"ema\" or \"hard\"");
  t.hard_target = mode == "hard";
  r.get("hard_update_interval", t.hard_update_interval);
  r.get("grad_clip", t.grad_clip);
  r.get("hidden", t.hidden);
  r.get("double_q", t.double_q);
  r.get("checkpoint_interval", t.checkpoint_interval);
  r.get("log_interval_episodes", t.log_interval_episodes);
  r.finish();
}

void read_planner(const json& j, PlannerSettings& p) {
  Reader r(j, "planner");
  r.get("W", p.model.window);
  r.get("L", p.model.horizon);
  r.get("T", p.model.temperature);
  r.get("embed", p.model.embed);
  r.get("ff", p.model.ff);
  r.get("batch_size", p.batch_size);
  r.get("lr", p.lr);
  std::string labels = p.oracle_labels ? "oracle" : "planner";
  r.get("labels", labels);
  if (labels != "planner" && labels != "oracle") throw ConfigError("planner.labels must be 'planner' or 'oracle'");
  p.oracle_labels = labels == "oracle";
  r.get("train_during_pretrain", p.train_during_pretrain);
  r.finish();
}

void read_eval(const json& j, EvalConfig& e) {
  Reader r(j, "eval");
  r.get("episodes", e.episodes);
  r.get("attackers", e.attackers);
  r.get("k", e.k);
  r.get("epsilon", e.epsilon);
  r.get("jobs", e.jobs);
  r.get("attacker_checkpoint", e.attacker_checkpoint);
  r.finish();
}

}  // namespace

std::vector<std::string> RunConfig::validate() const {
  scenario.validate();
  std::vector<std::string> warnings;
  if (auto w = attack.validate(scenario.n_predators)) warnings.push_back(*w);
  const auto& t = train;
  if (t.total_steps < 0 || t.pretrain_steps < 0 || t.pretrain_steps > t.total_steps) {
    throw ConfigError("train: need 0 <= pretrain_steps <= total_steps");
  }
  if (t.buffer_episodes < 1 || t.batch_size < 1 || t.train_interval_episodes < 1 || t.updates_per_train < 1 || t.hidden < 1 ||
      t.hard_update_interval < 1 ||
      t.log_interval_episodes < 1 || t.checkpoint_interval < 0) {
    throw ConfigError("train: sizes and intervals must be positive");
  }
  if (!(t.lr > 0) || !(t.gamma >= 0 && t.gamma <= 1) || !(t.ema_rate >= 0 && t.ema_rate <= 1) ||
      !(t.grad_clip > 0) || !(t.rms_alpha >= 0 && t.rms_alpha < 1) || !(t.rms_eps > 0)) {
    throw ConfigError("train: invalid optimizer or TD constants");
  }
  if (!(t.epsilon_start >= 0 && t.epsilon_start <= 1 && t.epsilon_finish >= 0 && t.epsilon_finish <= 1) ||
      t.epsilon_anneal_steps < 0) {
    throw ConfigError("train: epsilon values must lie in [0, 1]");
  }
  const auto& p = planner;
  if (p.model.window < 1 || p.model.horizon < 1 || p.model.embed < 1 || p.model.ff < 1 || p.batch_size < 1 ||
      !(p.lr > 0)) {
    throw ConfigError("planner: sizes must be positive");
  }
  if (!(p.model.temperature > 0)) throw ConfigError("planner.T must be > 0");
  if (eval.episodes < 0 || eval.k < 0 || eval.jobs < 1 || !(eval.epsilon >= 0 && eval.epsilon <= 1)) {
    throw ConfigError("eval: invalid episodes, k, jobs or epsilon");
  }
  for (const auto& a : eval.attackers) {
    if (a != "natural" && a != "random" && a != "wolfpack") throw ConfigError("eval: unknown attacker '" + a + "'");
  }
  if (seeds.empty()) throw ConfigError("seeds: at least one seed is required");
  learner::Mixer{mixer};
  if (mixer.n_agents != scenario.n_predators || mixer.state_dim != scenario.state_dim()) {
    throw InternalError("mixer dimensions not derived from the scenario");
  }
  return warnings;
}

RunConfig parse_config(const json& j) {
  RunConfig c;
  Reader r(j, "config");
  if (const auto* s = r.child("scenario")) read_scenario(*s, c.scenario);
  if (const auto* m = r.child("mixer")) read_mixer(*m, c.mixer);
  if (const auto* a = r.child("attack")) read_attack(*a, c.attack);
  if (const auto* t = r.child("train")) read_train(*t, c.train);
  if (const auto* p = r.child("planner")) read_planner(*p, c.planner);
  if (const auto* e = r.child("eval")) read_eval(*e, c.eval);
  r.get("seeds", c.seeds);
  r.finish();
  c.mixer.n_agents = c.scenario.n_predators;
  c.mixer.state_dim = c.scenario.state_dim();
  return c;
}

json to_json(const RunConfig& c) {
  const auto& s = c.scenario;
  const auto& ph = s.physics;
  const auto& a = c.attack;
  const auto& t = c.train;
  const auto& p = c.planner;
  return {
      {"scenario",
       {{"n_predators", s.n_predators},
        {"n_prey", s.n_prey},
        {"n_landmarks", s.n_landmarks},
        {"episode_limit", s.episode_limit},
        {"reward_per_collision", s.reward_per_collision},
        {"seed", s.seed},
        {"physics",
         {{"dt", ph.dt},
          {"damping", ph.damping},
          {"predator_accel", ph.predator_accel},
          {"prey_accel", ph.prey_accel},
          {"predator_max_speed", ph.predator_max_speed},
          {"prey_max_speed", ph.prey_max_speed},
          {"predator_radius", ph.predator_radius},
          {"prey_radius", ph.prey_radius}}}}},
      {"mixer",
       {{"kind", learner::to_string(c.mixer.kind)},
        {"embed", c.mixer.embed},
        {"hypernet_layers", c.mixer.hypernet_layers},
        {"hypernet_embed", c.mixer.hypernet_embed}}},
      {"attack",
       {{"K_WP", a.k_wp},
        {"t_WP", a.t_wp},
        {"m", a.m},
        {"init_mode", attack::to_string(a.init)},
        {"followup_mode", attack::to_string(a.followup)},
        {"step_mode", attack::to_string(a.step)},
        {"budget_mode", attack::to_string(a.budget)},
        {"alpha_virtual", a.alpha_virtual},
        {"kl_temperature", a.kl_temperature},
        {"force_deadline", a.force_deadline}}},
      {"train",
       {{"total_steps", t.total_steps},
        {"pretrain_steps", t.pretrain_steps},
        {"lr", t.lr},
        {"rms_alpha", t.rms_alpha},
        {"rms_eps", t.rms_eps},
        {"gamma", t.gamma},
        {"buffer_episodes", t.buffer_episodes},
        {"batch_size", t.batch_size},
        {"train_interval_episodes", t.train_interval_episodes},
        {"updates_per_train", t.updates_per_train},
        {"epsilon", {{"start", t.epsilon_start}, {"finish", t.epsilon_finish}, {"anneal_steps", t.epsilon_anneal_steps}}},
        {"ema_rate", t.ema_rate},
        {"target_update", t.hard_target ? "hard" : "ema"},
        {"hard_update_interval", t.hard_update_interval},
        {"grad_clip", t.grad_clip},
        {"hidden", t.hidden},
        {"double_q", t.double_q},
        {"checkpoint_interval", t.checkpoint_interval},
        {"log_interval_episodes", t.log_interval_episodes}}},
      {"planner",
       {{"W", p.model.window},
        {"L", p.model.horizon},
        {"T", p.model.temperature},
        {"embed", p.model.embed},
        {"ff", p.model.ff},
        {"batch_size", p.batch_size},
        {"lr", p.lr},
        {"labels", p.oracle_labels ? "oracle" : "planner"},
        {"train_during_pretrain", p.train_during_pretrain}}},
      {"eval",
       {{"episodes", c.eval.episodes},
        {"attackers", c.eval.attackers},
        {"k", c.eval.k},
        {"epsilon", c.eval.epsilon},
        {"jobs", c.eval.jobs},
        {"attacker_checkpoint", c.eval.attacker_checkpoint}}},
      {"seeds", c.seeds}};
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  return parse_config(j);
}

}  // namespace wolfpack::harness
