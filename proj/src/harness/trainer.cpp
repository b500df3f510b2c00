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

#include "wolfpack/harness/trainer.hpp"

#include <cmath>
#include <deque>
#include <filesystem>
#include <fstream>
#include <numeric>

#include "wolfpack/errors.hpp"
#include "wolfpack/harness/replay.hpp"
#include "wolfpack/learner/control.hpp"
#include "wolfpack/learner/td_loss.hpp"
#include "wolfpack/tensor/optim.hpp"

namespace wolfpack::harness {
namespace {

using nlohmann::json;

json nullable(double v, bool have) { return have ? json(v) : json(nullptr); }

class Trainer {
 public:
  Trainer(const RunConfig& config, std::uint64_t seed, const TrainOptions& options)
      : config_(config),
        seed_(seed),
        options_(options),
        env_(config.scenario),
        models_(std::make_unique<Models>(config)),
        buffer_(config.train.buffer_episodes),
        env_rng_(make_stream(seed, Stream::kEnv)),
        buffer_rng_(make_stream(seed, Stream::kBuffer)),
        rngs_{make_stream(seed, Stream::kExplore), make_stream(seed, Stream::kAttacker),
              make_stream(seed, Stream::kPlanner)},
        q_opt_({config.train.lr, config.train.rms_alpha, config.train.rms_eps}),
        planning_opt_({config.planner.lr, config.train.rms_alpha, config.train.rms_eps}),
        qdiff_opt_({config.planner.lr, config.train.rms_alpha, config.train.rms_eps}),
        epsilon_{config.train.epsilon_start, config.train.epsilon_finish, config.train.epsilon_anneal_steps} {
    models_->init(seed);
    target_ = models_->params;
    if (!options_.out_dir.empty()) std::filesystem::create_directories(options_.out_dir);
  }

  TrainResult run() {
    TrainResult result;
    run_phase("pretrain", config_.train.pretrain_steps, false, result.pretrain_attacked_steps);
    if (!options_.out_dir.empty()) {
      result.vanilla_checkpoint = path("vanilla.wlf");
      save_models(result.vanilla_checkpoint, *models_, checkpoint_meta(*models_, seed_, "pretrain", steps_, episodes_));
    }
    run_phase("adversarial", config_.train.total_steps, true, result.adversarial_attacked_steps);
    if (!options_.out_dir.empty()) {
      result.final_checkpoint = path("final.wlf");
      save_models(result.final_checkpoint, *models_, checkpoint_meta(*models_, seed_, "adversarial", steps_, episodes_));
    }
    result.env_steps = steps_;
    result.episodes = episodes_;
    result.mean_return_last100 = mean_recent();
    result.models = std::move(models_);
    return result;
  }

 private:
  std::string path(const std::string& name) const { return (std::filesystem::path(options_.out_dir) / name).string(); }

  double mean_recent() const {
    if (recent_.empty()) return 0;
    return std::accumulate(recent_.begin(), recent_.end(), 0.0) / static_cast<double>(recent_.size());
  }

  void emit(json row) {
    row["run"] = options_.run_id;
    row["seed"] = seed_;
    for (const auto& item : options_.tags.items()) row[item.key()] = item.value();
    if (options_.on_row) options_.on_row(row);
    if (options_.metrics != nullptr) options_.metrics->write(std::move(row));
  }

  void run_phase(const std::string& phase, long until, bool adversarial, long& attacked_total) {
    const auto& at = config_.attack;
    const bool planner_on = adversarial || config_.planner.train_during_pretrain;
    EpisodeOptions opts;
    opts.attack = at;
    if (adversarial && at.k_wp > 0) {
      opts.attacker = AttackerKind::kWolfpack;
      opts.k = at.total_budget();
      opts.k_wp = at.k_wp;
    }
    opts.keep_hiddens = planner_on;
    opts.keep_worlds = planner_on && config_.planner.oracle_labels;

    while (steps_ < until) {
      opts.epsilon = epsilon_(steps_);
      const long step_before = steps_;
      auto out = run_episode(env_, *models_, *models_, opts, env_rng_(), rngs_);
      Eigen::VectorXd labels;
      if (planner_on) {
        labels = compute_labels(env_, *models_, at, out, config_.planner.oracle_labels, rngs_.planner);
      }
      const auto& rec = out.record;
      steps_ += rec.length();
      ++episodes_;
      const int attacked = rec.attacked_steps();
      attacked_total += attacked;
      recent_.push_back(rec.episode_return);
      if (recent_.size() > 100) recent_.pop_front();
      const bool log_now = episodes_ % config_.train.log_interval_episodes == 0;
      json attack_rows = json::array();
      double dq_sum = 0;
      for (const auto& e : rec.attack_log) {
        dq_sum += e.delta_q;
        if (log_now) {
          attack_rows.push_back({{"kind", "attack"},
                                 {"phase", phase},
                                 {"step", step_before + e.step + 1},
                                 {"episode", episodes_},
                                 {"t", e.step},
                                 {"targets", e.targets},
                                 {"delta_q", e.delta_q},
                                 {"window", e.window_id},
                                 {"attack_kind", e.kind}});
        }
      }
      buffer_.add(rec, std::move(labels));

      try {
        if (episodes_ % config_.train.train_interval_episodes == 0 &&
            static_cast<int>(buffer_.size()) >= config_.train.batch_size) {
          for (int u = 0; u < config_.train.updates_per_train; ++u) q_step();
        }
        if (planner_on && static_cast<int>(buffer_.size()) >= config_.planner.batch_size) planner_step();
      } catch (const TrainingError& e) {
        dump_diagnostic(phase, e.what());
        throw;
      }

      if (log_now) {
        for (auto& r : attack_rows) emit(std::move(r));
        emit({{"kind", "train"},
              {"phase", phase},
              {"step", steps_},
              {"episode", episodes_},
              {"return", rec.episode_return},
              {"return_mean100", mean_recent()},
              {"epsilon", opts.epsilon},
              {"td_loss", nullable(td_loss_, have_td_)},
              {"q_tot", nullable(q_tot_, have_td_)},
              {"grad_norm", nullable(grad_norm_, have_td_)},
              {"planning_loss", nullable(planning_loss_, have_planner_)},
              {"qdiff_loss", nullable(qdiff_loss_, have_qdiff_)},
              {"attacked_steps", attacked},
              {"delta_q_sum", dq_sum}});
      }
      const long interval = config_.train.checkpoint_interval;
      if (interval > 0 && !options_.out_dir.empty() && steps_ / interval != step_before / interval) {
        save_models(path("step_" + std::to_string(steps_) + ".wlf"), *models_,
                    checkpoint_meta(*models_, seed_, phase, steps_, episodes_));
      }
    }
  }

  void q_step() {
    auto sample = buffer_.sample(config_.train.batch_size, buffer_rng_);
    std::vector<const EpisodeRecord*> batch;
    batch.reserve(sample.size());
    for (const auto* s : sample) batch.push_back(&s->record);
    const learner::TdConfig td{config_.train.gamma, config_.train.double_q};
    const auto stats = learner::td_loss(batch, models_->agent, models_->mixer, models_->params, target_, td);
    td_loss_ = stats.loss;
    q_tot_ = stats.mean_q_tot;
    have_td_ = true;
    if (!std::isfinite(stats.loss)) throw TrainingError("non-finite TD loss");
    grad_norm_ = tensor::clip_global_norm(models_->params, config_.train.grad_clip);
    q_opt_.step(models_->params);
    ++updates_;
    if (!config_.train.hard_target) {
      learner::ema_update(target_, models_->params, config_.train.ema_rate);
    } else if (updates_ % config_.train.hard_update_interval == 0) {
      learner::hard_update(target_, models_->params);
    }
  }

  void planner_step() {
    const int B = config_.planner.batch_size;
    auto sample = buffer_.sample(B, buffer_rng_);
    std::vector<const EpisodeRecord*> eps;
    std::vector<const Eigen::VectorXd*> labels;
    for (const auto* s : sample) eps.push_back(&s->record);
    auto windows = planner::sample_windows(eps, {}, B, buffer_rng_);
    auto pb = models_->planning.make_batch(windows);
    {
      models_->planning_params.zero_grad();
      Tape tape;
      auto loss = models_->planning.loss(tape, models_->planning_params, pb);
      planning_loss_ = loss.value()(0, 0);
      have_planner_ = true;
      if (!std::isfinite(planning_loss_)) throw TrainingError("non-finite planning loss");
      tape.backward(loss);
      tensor::clip_global_norm(models_->planning_params, config_.train.grad_clip);
      planning_opt_.step(models_->planning_params);
    }
    eps.clear();
    for (const auto* s : sample) {
      if (s->labels.size() == s->record.length()) {
        eps.push_back(&s->record);
        labels.push_back(&s->labels);
      }
    }
    if (eps.empty()) return;
    auto qwin = planner::sample_windows(eps, labels, B, buffer_rng_);
    auto qb = models_->qdiff.make_batch(qwin);
    models_->qdiff_params.zero_grad();
    Tape tape;
    auto loss = models_->qdiff.loss(tape, models_->qdiff_params, qb);
    qdiff_loss_ = loss.value()(0, 0);
    have_qdiff_ = true;
    if (!std::isfinite(qdiff_loss_)) throw TrainingError("non-finite Q-difference loss");
    tape.backward(loss);
    tensor::clip_global_norm(models_->qdiff_params, config_.train.grad_clip);
    qdiff_opt_.step(models_->qdiff_params);
  }

  void dump_diagnostic(const std::string& phase, const std::string& what) {
    if (options_.out_dir.empty()) return;
    json params = json::object();
    for (const auto& e : models_->params.entries()) {
      params[e.name] = {{"value_norm", e.value.norm()},
                        {"grad_norm", e.grad.norm()},
                        {"finite", e.value.allFinite() && e.grad.allFinite()}};
    }
    json d = {{"error", what},
              {"phase", phase},
              {"step", steps_},
              {"episode", episodes_},
              {"td_loss", td_loss_},
              {"planning_loss", planning_loss_},
              {"qdiff_loss", qdiff_loss_},
              {"params", params}};
    std::ofstream(path("diagnostic.json")) << d.dump(2) << '\n';
  }

  RunConfig config_;
  std::uint64_t seed_;
  TrainOptions options_;
  env::PredatorPrey env_;
  std::unique_ptr<Models> models_;
  ParamStore target_;
  ReplayBuffer buffer_;
  std::mt19937_64 env_rng_;
  std::mt19937_64 buffer_rng_;
  EpisodeRngs rngs_;
  tensor::RmsProp<double> q_opt_;
  tensor::RmsProp<double> planning_opt_;
  tensor::RmsProp<double> qdiff_opt_;
  learner::EpsilonSchedule epsilon_;
  long steps_ = 0;
  long episodes_ = 0;
  long updates_ = 0;
  std::deque<double> recent_;
  double td_loss_ = 0, q_tot_ = 0, grad_norm_ = 0, planning_loss_ = 0, qdiff_loss_ = 0;
  bool have_td_ = false, have_planner_ = false, have_qdiff_ = false;
};

}  // namespace

TrainResult train(const RunConfig& config, std::uint64_t seed, const TrainOptions& options) {
  config.validate();
  return Trainer(config, seed, options).run();
}

}  // namespace wolfpack::harness
