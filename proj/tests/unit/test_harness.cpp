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

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <random>
#include <set>
#include <vector>

#include "wolfpack/errors.hpp"
#include "wolfpack/harness/config.hpp"
#include "wolfpack/harness/evaluate.hpp"
#include "wolfpack/harness/metrics.hpp"
#include "wolfpack/harness/replay.hpp"
#include "wolfpack/harness/runner.hpp"
#include "wolfpack/harness/sweep.hpp"
#include "wolfpack/harness/trainer.hpp"
#include "wolfpack/tensor/checkpoint.hpp"

using namespace wolfpack;
using namespace wolfpack::harness;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

RunConfig tiny_config() {
  RunConfig c;
  c.mixer.embed = 4;
  c.mixer.hypernet_embed = 8;
  c.train.hidden = 8;
  c.train.total_steps = 600;
  c.train.pretrain_steps = 300;
  c.train.batch_size = 4;
  c.train.buffer_episodes = 50;
  c.train.epsilon_anneal_steps = 300;
  c.train.log_interval_episodes = 1;
  c.planner.model.window = 4;
  c.planner.model.horizon = 4;
  c.planner.model.embed = 8;
  c.planner.model.ff = 16;
  c.planner.batch_size = 4;
  c.eval.episodes = 6;
  c.seeds = {1};
  c.mixer.n_agents = c.scenario.n_predators;
  c.mixer.state_dim = c.scenario.state_dim();
  return c;
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("wolfpack_harness_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::vector<std::uint8_t> file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

EpisodeRecord dummy_record(int id) {
  EpisodeRecord r;
  r.n_agents = 1;
  r.obs_dim = 1;
  r.states = Eigen::MatrixXd::Constant(2, 1, id);
  r.actions = Eigen::MatrixXi::Zero(1, 1);
  r.original_actions = r.actions;
  r.attacked = r.actions;
  r.rewards = Eigen::VectorXd::Constant(1, id);
  r.done = Eigen::VectorXi::Ones(1);
  r.episode_return = id;
  return r;
}

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig d;
  CHECK(to_json(parse_config(to_json(d))) == to_json(d));
  CHECK(to_json(parse_config(json::object())) == to_json(d));
  CHECK(d.train.lr == 5e-4);
  CHECK(d.train.buffer_episodes == 5000);
  CHECK(d.train.batch_size == 32);
  CHECK(d.train.grad_clip == 10.0);
  CHECK(d.planner.model.embed == 64);

  auto j = to_json(d);
  j["attack"]["m"] = 2;
  j["planner"]["T"] = 0.1;
  j["mixer"]["kind"] = "vdn";
  const auto c = parse_config(j);
  CHECK(c.attack.m == 2);
  CHECK(c.planner.model.temperature == 0.1);
  CHECK(c.mixer.kind == learner::MixerKind::kVdn);
  CHECK(c.mixer.state_dim == c.scenario.state_dim());

  CHECK_THROWS_AS(parse_config(json{{"bogus", 1}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"train", {{"lr", 1e-3}, {"lrr", 1}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"scenario", {{"physics", {{"gravity", 9.8}}}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"train", {{"lr", "fast"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"attack", {{"followup_mode", "kll"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json::array()), ConfigError);

  auto bad = d;
  bad.train.pretrain_steps = bad.train.total_steps + 1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = d;
  bad.attack.m = 3;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = d;
  bad.eval.attackers = {"natural", "sneaky"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = d;
  bad.planner.model.temperature = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config file loading") {
  const auto dir = scratch("config");
  std::ofstream(dir / "ok.json") << R"({"attack": {"K_WP": 2}, "seeds": [7]})";
  std::ofstream(dir / "broken.json") << R"({"attack": )";
  const auto c = load_config((dir / "ok.json").string());
  CHECK(c.attack.k_wp == 2);
  CHECK(c.seeds == std::vector<std::uint64_t>{7});
  CHECK_THROWS_AS(load_config((dir / "broken.json").string()), ConfigError);
  CHECK_THROWS_AS(load_config((dir / "missing.json").string()), ConfigError);
}

TEST_CASE("replay buffer") {
  ReplayBuffer buf(5000);
  std::mt19937_64 rng(3);
  CHECK_THROWS_AS(buf.sample(4, rng), DomainError);
  for (int e = 0; e < 5001; ++e) buf.add(dummy_record(e));
  CHECK(buf.size() == 5000);
  CHECK(buf.total_added() == 5001);
  CHECK(buf.at(0).id == 1);
  CHECK(buf.at(4999).id == 5000);

  std::mt19937_64 r1(11), r2(11);
  const auto a = buf.sample(32, r1);
  const auto b = buf.sample(32, r2);
  CHECK(a.size() == 32);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i] == b[i]);
    CHECK(a[i]->id >= 1);
    CHECK(a[i]->id <= 5000);
  }

  ReplayBuffer small(20);
  for (int e = 0; e < 12; ++e) small.add(dummy_record(e));
  std::set<long> seen;
  for (const auto* s : small.sample(2000, rng)) seen.insert(s->id);
  CHECK(seen.size() == 12);
  for (int e = 12; e < 30; ++e) small.add(dummy_record(e));
  seen.clear();
  for (const auto* s : small.sample(4000, rng)) seen.insert(s->id);
  CHECK(seen.size() == 20);
  CHECK(*seen.begin() == 10);

  CHECK_THROWS_AS(small.add(dummy_record(0), Eigen::VectorXd::Zero(3)), ShapeError);
  CHECK_THROWS_AS(ReplayBuffer(0), ConfigError);
}

TEST_CASE("metrics rows and export") {
  const auto dir = scratch("metrics");
  {
    MetricsWriter w((dir / "a.jsonl").string());
    w.write({{"kind", "train"}, {"step", 50}, {"return", 1.5}});
    w.write({{"kind", "attack"}, {"step", 12}, {"targets", {0, 2}}});
    w.write_all({{{"kind", "stepprob"}, {"t", 0}, {"p", 0.1}}, {{"kind", "eval"}, {"mean_return", 3.0}}});
  }
  const auto rows = read_metrics_dir(dir.string());
  REQUIRE(rows.size() == 4);
  for (const auto& r : rows) CHECK(r["v"] == 1);

  const auto curves = export_rows(rows, ExportWhat::kCurves, "jsonl");
  CHECK(std::count(curves.begin(), curves.end(), '\n') == 2);
  const auto attacks = export_rows(rows, ExportWhat::kAttacks, "csv");
  CHECK(attacks.substr(0, attacks.find('\n')) == "kind,step,targets,v");
  CHECK(attacks.find("\"[0,2]\"") != std::string::npos);
  CHECK_THROWS_AS(export_rows(rows, ExportWhat::kAttacks, "xml"), ConfigError);
  CHECK_THROWS_AS(parse_export_what("everything"), ConfigError);

  std::ofstream(dir / "old.jsonl") << R"({"v": 0, "kind": "train"})" << "\n";
  CHECK_THROWS_AS(read_metrics((dir / "old.jsonl").string()), LoadError);
}

TEST_CASE("episodes under each attacker") {
  auto cfg = tiny_config();
  Models m(cfg);
  m.init(5);
  const env::PredatorPrey env(cfg.scenario);
  EpisodeRngs rngs{std::mt19937_64(1), std::mt19937_64(2), std::mt19937_64(3)};

  EpisodeOptions natural;
  natural.epsilon = 0.3;
  auto out = run_episode(env, m, m, natural, 9, rngs);
  const auto& rec = out.record;
  CHECK(rec.length() == 50);
  CHECK(rec.states.rows() == 51);
  CHECK(rec.attacked_steps() == 0);
  CHECK(rec.actions == rec.original_actions);
  CHECK(rec.episode_return == doctest::Approx(rec.rewards.sum()));
  CHECK(rec.done(49) == 1);
  CHECK(rec.done.head(49).sum() == 0);

  EpisodeOptions random;
  random.attacker = AttackerKind::kRandom;
  random.k = 7;
  for (int e = 0; e < 20; ++e) {
    const auto r = run_episode(env, m, m, random, e, rngs).record;
    CHECK(r.attacked_steps() == 7);
    for (int t = 0; t < r.length(); ++t) {
      if (r.attacked.row(t).any()) CHECK(r.actions.row(t) != r.original_actions.row(t));
    }
  }

  for (auto step_mode : {attack::StepMode::kRandom, attack::StepMode::kPlanner}) {
    EpisodeOptions wp;
    wp.attacker = AttackerKind::kWolfpack;
    wp.attack.k_wp = 2;
    wp.attack.t_wp = 3;
    wp.attack.step = step_mode;
    wp.k = 8;
    wp.k_wp = 2;
    wp.trace_step_probs = true;
    for (int e = 0; e < 20; ++e) {
      const auto o = run_episode(env, m, m, wp, 100 + e, rngs);
      CHECK(o.record.attacked_steps() == 8);
      int windows = 0;
      for (const auto& a : o.record.attack_log) windows += a.kind == "initial" ? 1 : 0;
      CHECK(windows == 2);
      if (step_mode == attack::StepMode::kPlanner) {
        CHECK(!o.step_probs.empty());
        for (const auto& sp : o.step_probs) {
          CHECK(sp.p >= 0.0);
          CHECK(sp.p <= 1.0);
        }
      } else {
        CHECK(o.step_probs.empty());
      }
    }
  }

  EpisodeOptions dev;
  dev.attacker = AttackerKind::kWolfpack;
  dev.attack.budget = attack::BudgetMode::kDeviationOnly;
  dev.attack.step = attack::StepMode::kRandom;
  dev.k = 4;
  dev.k_wp = 1;
  for (int e = 0; e < 20; ++e) {
    const auto r = run_episode(env, m, m, dev, 200 + e, rngs).record;
    CHECK(r.attacked_steps() <= 4);
    for (int t = 0; t < r.length(); ++t) {
      for (int i = 0; i < r.n_agents; ++i) {
        CHECK(r.attacked(t, i) == (r.actions(t, i) != r.original_actions(t, i) ? 1 : 0));
      }
    }
  }
}

TEST_CASE("q-difference labels") {
  auto cfg = tiny_config();
  Models m(cfg);
  m.init(2);
  const env::PredatorPrey env(cfg.scenario);
  EpisodeRngs rngs{std::mt19937_64(1), std::mt19937_64(2), std::mt19937_64(3)};
  EpisodeOptions opts;
  opts.epsilon = 0.5;
  auto out = run_episode(env, m, m, opts, 4, rngs);
  std::mt19937_64 rng(0);
  CHECK_THROWS_AS(compute_labels(env, m, cfg.attack, out, false, rng), ShapeError);
  opts.keep_hiddens = opts.keep_worlds = true;
  rngs = {std::mt19937_64(1), std::mt19937_64(2), std::mt19937_64(3)};
  out = run_episode(env, m, m, opts, 4, rngs);
  const auto planned = compute_labels(env, m, cfg.attack, out, false, rng);
  const auto oracle = compute_labels(env, m, cfg.attack, out, true, rng);
  REQUIRE(planned.size() == 50);
  REQUIRE(oracle.size() == 50);
  CHECK(planned.allFinite());
  CHECK(oracle.minCoeff() >= -1e-9);
  // The final step has no room for follow-ups, so both labels are one attack.
  CHECK(planned(49) == doctest::Approx(oracle(49)).epsilon(1e-12));
}

TEST_CASE("evaluation determinism and budgets") {
  auto cfg = tiny_config();
  Models m(cfg);
  m.init(8);
  EvalRequest req;
  req.episodes = 6;
  req.k = 4;
  req.seed = 21;
  for (auto kind : {AttackerKind::kNatural, AttackerKind::kRandom, AttackerKind::kWolfpack}) {
    req.attacker = kind;
    req.jobs = 1;
    const auto a = evaluate(m, req);
    req.jobs = 3;
    const auto b = evaluate(m, req);
    CHECK(a.to_json() == b.to_json());
    CHECK(a.max_attacked_steps <= 4);
    if (kind == AttackerKind::kNatural) {
      CHECK(a.max_attacked_steps == 0);
      CHECK(a.k == 0);
    } else {
      CHECK(a.k == 4);
      CHECK(a.min_attacked_steps == 4);
    }
  }
  std::vector<json> rows;
  req.attacker = AttackerKind::kWolfpack;
  req.trace_step_probs = true;
  const auto s = evaluate(m, req, &rows);
  CHECK(s.k_wp == 1);
  CHECK(rows.back()["kind"] == "eval");
  int attacks = 0;
  for (const auto& r : rows) attacks += r["kind"] == "attack" ? 1 : 0;
  CHECK(attacks == 6 * 4);
}

TEST_CASE("checkpoints") {
  const auto dir = scratch("ckpt");
  auto cfg = tiny_config();
  Models m(cfg);
  m.init(4);
  const auto meta = checkpoint_meta(m, 4, "pretrain", 123, 4);
  save_models((dir / "a.wlf").string(), m, meta);
  json loaded_meta;
  const auto back = load_models((dir / "a.wlf").string(), &loaded_meta);
  CHECK(loaded_meta == meta);
  save_models((dir / "b.wlf").string(), back, loaded_meta);
  CHECK(file_bytes(dir / "a.wlf") == file_bytes(dir / "b.wlf"));

  auto bytes = file_bytes(dir / "a.wlf");
  bytes.resize(bytes.size() / 2);
  std::ofstream(dir / "cut.wlf", std::ios::binary).write(reinterpret_cast<const char*>(bytes.data()), bytes.size());
  CHECK_THROWS_AS(load_models((dir / "cut.wlf").string()), LoadError);

  auto other = cfg;
  other.scenario = env::ScenarioSpec::predator_prey(4, 2);
  CHECK_THROWS_AS(require_compatible(back, other.scenario), ShapeError);
  Models wide(other);
  wide.init(1);
  EpisodeRngs rngs;
  CHECK_THROWS_AS(run_episode(env::PredatorPrey(cfg.scenario), back, wide, EpisodeOptions{}, 1, rngs), ShapeError);
  auto ckpt = tensor::load_checkpoint((dir / "a.wlf").string());
  CHECK_THROWS_AS(tensor::assign_from(ckpt, wide.params), LoadError);
}

TEST_CASE("training phases") {
  const auto dir = scratch("train");
  auto cfg = tiny_config();
  std::vector<json> rows;
  TrainOptions opt;
  opt.out_dir = dir.string();
  opt.on_row = [&](const json& r) { rows.push_back(r); };
  const auto res = train(cfg, 3, opt);
  CHECK(res.env_steps == 600);
  CHECK(res.episodes == 12);
  CHECK(res.pretrain_attacked_steps == 0);
  CHECK(res.adversarial_attacked_steps == 6 * cfg.attack.total_budget());
  CHECK(fs::exists(res.vanilla_checkpoint));
  CHECK(fs::exists(res.final_checkpoint));

  long last = -1;
  int train_rows = 0;
  for (const auto& r : rows) {
    if (r["kind"] == "attack") CHECK(r["phase"] == "adversarial");
    if (r["kind"] != "train") continue;
    ++train_rows;
    CHECK(r["step"].get<long>() > last);
    last = r["step"].get<long>();
    if (r["phase"] == "pretrain") {
      CHECK(r["attacked_steps"] == 0);
    } else {
      CHECK(r["attacked_steps"] == cfg.attack.total_budget());
    }
  }
  CHECK(train_rows == 12);
  CHECK(!rows.back()["td_loss"].is_null());
  CHECK(!rows.back()["qdiff_loss"].is_null());

  std::vector<json> again;
  opt.out_dir.clear();
  opt.on_row = [&](const json& r) { again.push_back(r); };
  train(cfg, 3, opt);
  CHECK(again == rows);
}

TEST_CASE("zero wolfpack budget degenerates to vanilla training") {
  auto vanilla = tiny_config();
  vanilla.train.pretrain_steps = vanilla.train.total_steps;
  auto zero = tiny_config();
  zero.attack.k_wp = 0;
  const auto a = train(vanilla, 5);
  const auto b = train(zero, 5);
  CHECK(b.adversarial_attacked_steps == 0);
  REQUIRE(a.models->params.same_layout(b.models->params));
  for (std::size_t k = 0; k < a.models->params.size(); ++k) {
    CHECK(a.models->params.entries()[k].value == b.models->params.entries()[k].value);
  }
  EvalRequest req;
  req.episodes = 4;
  req.seed = 77;
  CHECK(evaluate(*a.models, req).mean_return == evaluate(*b.models, req).mean_return);
}

TEST_CASE("hard target updates") {
  auto cfg = parse_config(json{{"train", {{"target_update", "hard"}, {"hard_update_interval", 3}}}});
  CHECK(cfg.train.hard_target);
  CHECK(cfg.train.hard_update_interval == 3);
  CHECK(parse_config(to_json(cfg)).train.hard_target);
  CHECK_THROWS_AS(parse_config(json{{"train", {{"target_update", "soft"}}}}), ConfigError);
  CHECK_THROWS_AS(parse_config(json{{"train", {{"hard_update_interval", 0}}}}).validate(), ConfigError);

  auto a = tiny_config();
  a.train.pretrain_steps = a.train.total_steps;
  auto b = a;
  b.train.hard_target = true;
  b.train.hard_update_interval = 2;
  const auto ra = train(a, 4);
  const auto rb = train(b, 4);
  CHECK(rb.episodes == ra.episodes);
  bool differs = false;
  for (std::size_t k = 0; k < ra.models->params.size(); ++k) {
    differs = differs || ra.models->params.entries()[k].value != rb.models->params.entries()[k].value;
  }
  CHECK(differs);
}

TEST_CASE("sweep grid") {
  auto base = tiny_config();
  const auto cells = expand_grid(base, json{{"m", {1, 2}}, {"T", {0.1, 0.5}}});
  REQUIRE(cells.size() == 4);
  CHECK(cells[0].assignment == json{{"attack.m", 1}, {"planner.T", 0.1}});
  CHECK(cells[1].assignment == json{{"attack.m", 2}, {"planner.T", 0.1}});
  CHECK(cells[3].config.attack.m == 2);
  CHECK(cells[3].config.planner.model.temperature == 0.5);
  for (const auto& c : cells) CHECK(c.feasible);

  const auto with_bad = expand_grid(base, json{{"attack.m", {1, 3}}});
  REQUIRE(with_bad.size() == 2);
  CHECK(with_bad[0].feasible);
  CHECK(!with_bad[1].feasible);
  CHECK(!with_bad[1].reason.empty());

  const auto arm = expand_grid(base, json{{"followup_mode", {"random"}}, {"step_mode", {"random"}}});
  CHECK(arm[0].config.attack.followup == attack::FollowupMode::kRandom);
  CHECK(arm[0].config.attack.step == attack::StepMode::kRandom);

  CHECK_THROWS_AS(expand_grid(base, json{{"attack.q", {1}}}), ConfigError);
  CHECK_THROWS_AS(expand_grid(base, json{{"m", 1}}), ConfigError);
  CHECK(expand_grid(base, json::object()).size() == 1);

  const auto dir = scratch("sweep");
  base.train.total_steps = 300;
  base.train.pretrain_steps = 150;
  base.eval.episodes = 2;
  base.eval.attackers = {"natural", "wolfpack"};
  base.seeds = {1, 2};
  SweepOptions opt;
  opt.out_dir = dir.string();
  opt.jobs = 2;
  const auto rows = sweep(base, json{{"m", {1, 3}}}, opt);
  CHECK(rows.size() == 2 * 2);
  for (const auto& r : rows) {
    CHECK(r["kind"] == "eval");
    CHECK(r["cell"] == 0);
  }
  CHECK(fs::exists(dir / "cell_0" / "seed_2" / "metrics.jsonl"));
  CHECK(!fs::exists(dir / "cell_1"));
  const auto log = read_metrics((dir / "sweep.jsonl").string());
  REQUIRE(log.size() == 1);
  CHECK(log[0]["kind"] == "skip");
  CHECK(log[0]["cell"] == 1);
}
