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

#include "wolfpack/planner/models.hpp"

#include <Eigen/Cholesky>

#include <algorithm>

#include "wolfpack/errors.hpp"

namespace wolfpack::planner {
namespace {

Eigen::RowVectorXd flat_obs(const EpisodeRecord& ep, int t) {
  return ep.states.row(t).head(static_cast<Eigen::Index>(ep.n_agents) * ep.obs_dim);
}

void check_windows(const std::vector<WindowRef>& windows) {
  if (windows.empty()) throw DomainError("planner: empty batch");
  for (const auto& w : windows) {
    if (w.episode == nullptr || w.end < 1 || w.end > w.episode->length()) {
      throw DomainError("planner: window end outside the episode");
    }
  }
}

}  // namespace

SequenceEncoder::SequenceEncoder(std::string prefix, int input_dim, const PlannerConfig& config)
    : prefix_(std::move(prefix)), input_dim_(input_dim), window_(config.window), embed_(config.embed), ff_(config.ff) {
  if (input_dim <= 0 || config.window <= 0 || config.embed <= 0 || config.ff <= 0 || config.horizon <= 0) {
    throw ConfigError("planner: sizes must be positive");
  }
}

std::vector<WindowRef> sample_windows(const std::vector<const EpisodeRecord*>& episodes,
                                      const std::vector<const Eigen::VectorXd*>& labels, int count,
                                      std::mt19937_64& rng) {
  if (episodes.empty()) throw DomainError("sample_windows: no episodes");
  if (!labels.empty() && labels.size() != episodes.size()) throw ShapeError("sample_windows: one label set per episode");
  std::uniform_int_distribution<std::size_t> pick(0, episodes.size() - 1);
  std::vector<WindowRef> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int k = 0; k < count; ++k) {
    const auto e = pick(rng);
    const int len = episodes[e]->length();
    if (len < 1) throw DomainError("sample_windows: empty episode");
    out.push_back({episodes[e], labels.empty() ? nullptr : labels[e], std::uniform_int_distribution<int>(1, len)(rng)});
  }
  return out;
}

// The observation of every agent is a slice of the global state here, so
// o_k is read from the first n*d state columns.
PlanningModel::PlanningModel(const PlannerConfig& config, int state_dim, int n_agents, int obs_dim, int n_actions)
    : config_(config),
      state_dim_(state_dim),
      n_agents_(n_agents),
      obs_dim_(obs_dim),
      n_actions_(n_actions),
      encoder_("planner", state_dim + n_agents * n_actions, config) {
  if (n_agents * obs_dim > state_dim) throw ConfigError("planning model: observations must be a state prefix");
}

void PlanningModel::fill_token(Eigen::MatrixXd& tokens, Eigen::Index row, const Eigen::RowVectorXd& state,
                               const Eigen::RowVectorXi& actions) const {
  auto r = tokens.row(row);
  r.setZero();
  r.head(state_dim_) = state;
  for (int i = 0; i < n_agents_; ++i) {
    const int a = actions(i);
    if (a < 0 || a >= n_actions_) throw DomainError("planning model: action out of range");
    r(state_dim_ + i * n_actions_ + a) = 1.0;
  }
}

PlanningBatch PlanningModel::make_batch(const std::vector<WindowRef>& windows) const {
  check_windows(windows);
  const int W = config_.window;
  const auto rows = static_cast<Eigen::Index>(windows.size()) * W;
  const int od = n_agents_ * obs_dim_;
  PlanningBatch b;
  b.tokens = Eigen::MatrixXd::Zero(rows, token_dim());
  b.base_state = Eigen::MatrixXd::Zero(rows, state_dim_);
  b.base_obs = Eigen::MatrixXd::Zero(rows, od);
  b.target_state = Eigen::MatrixXd::Zero(rows, state_dim_);
  b.target_obs = Eigen::MatrixXd::Zero(rows, od);
  b.valid = Eigen::VectorXd::Zero(rows);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& ep = *windows[w].episode;
    if (ep.states.cols() != state_dim_ || ep.n_agents != n_agents_ || ep.obs_dim != obs_dim_) {
      throw ShapeError("planning model: episode shape mismatch");
    }
    const int end = windows[w].end;
    const int start = std::max(0, end - W);
    b.lengths.push_back(end - start);
    for (int k = start; k < end; ++k) {
      const auto r = static_cast<Eigen::Index>(w) * W + (k - start);
      fill_token(b.tokens, r, ep.states.row(k), ep.actions.row(k));
      b.base_state.row(r) = ep.states.row(k);
      b.base_obs.row(r) = flat_obs(ep, k);
      b.target_state.row(r) = ep.states.row(k + 1);
      b.target_obs.row(r) = flat_obs(ep, k + 1);
      b.valid(r) = 1.0;
    }
  }
  return b;
}

Var PlanningModel::loss(Tape& tape, ParamStore& store, const PlanningBatch& batch) const {
  const auto pred = forward(tape, store, batch);
  const double count = batch.valid.sum();
  return tensor::add(tensor::weighted_sse(pred.state, batch.target_state, batch.valid, count),
                     tensor::weighted_sse(pred.obs, batch.target_obs, batch.valid, count));
}

double PlanningModel::loss_value(const ParamStore& store, const PlanningBatch& batch) const {
  Tape tape(false);
  const auto pred = forward(tape, store, batch);
  const double count = batch.valid.sum();
  const auto sq = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    return ((a - b).array().square().colwise() * batch.valid.array()).sum();
  };
  return (sq(pred.state.value(), batch.target_state) + sq(pred.obs.value(), batch.target_obs)) / count;
}

double PlanningModel::fit_heads(ParamStore& store, const PlanningBatch& batch, double ridge) const {
  Eigen::MatrixXd h;
  {
    Tape tape(false);
    h = encoder_.encode(tape, store, batch.tokens, batch.lengths).value();
  }
  const auto rows = static_cast<Eigen::Index>(batch.valid.sum());
  const auto E = h.cols();
  Eigen::MatrixXd x(rows, E + 1);
  Eigen::MatrixXd ys(rows, state_dim_);
  Eigen::MatrixXd yo(rows, batch.target_obs.cols());
  Eigen::Index r = 0;
  for (Eigen::Index k = 0; k < h.rows(); ++k) {
    if (batch.valid(k) == 0.0) continue;
    x.row(r) << h.row(k), 1.0;
    ys.row(r) = batch.target_state.row(k) - batch.base_state.row(k);
    yo.row(r) = batch.target_obs.row(k) - batch.base_obs.row(k);
    ++r;
  }
  Eigen::MatrixXd gram = x.transpose() * x;
  gram.diagonal().array() += ridge;
  const Eigen::LDLT<Eigen::MatrixXd> solver(gram);
  const Eigen::MatrixXd ws = solver.solve(x.transpose() * ys);
  const Eigen::MatrixXd wo = solver.solve(x.transpose() * yo);
  store.at("planner.state_head.w").value = ws.topRows(E);
  store.at("planner.state_head.b").value = ws.bottomRows(1);
  store.at("planner.obs_head.w").value = wo.topRows(E);
  store.at("planner.obs_head.b").value = wo.bottomRows(1);
  return loss_value(store, batch);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> PlanningModel::predict(const ParamStore& store,
                                                                   const Eigen::MatrixXd& states,
                                                                   const Eigen::MatrixXd& obs,
                                                                   const Eigen::MatrixXi& actions) const {
  const auto k = states.rows();
  if (k < 1) throw DomainError("planning model: empty history");
  if (k > config_.window || obs.rows() != k || actions.rows() != k || states.cols() != state_dim_ ||
      actions.cols() != n_agents_ || obs.cols() != n_agents_ * obs_dim_) {
    throw ShapeError("planning model: history shape mismatch");
  }
  PlanningBatch b;
  const int W = config_.window;
  b.tokens = Eigen::MatrixXd::Zero(W, token_dim());
  b.base_state = Eigen::MatrixXd::Zero(W, state_dim_);
  b.base_obs = Eigen::MatrixXd::Zero(W, obs.cols());
  for (Eigen::Index r = 0; r < k; ++r) fill_token(b.tokens, r, states.row(r), actions.row(r));
  b.base_state.row(k - 1) = states.row(k - 1);
  b.base_obs.row(k - 1) = obs.row(k - 1);
  b.lengths = {k};
  Tape tape(false);
  const auto pred = forward(tape, store, b);
  return {pred.state.value().row(k - 1).transpose(), pred.obs.value().row(k - 1).transpose()};
}

QdiffModel::QdiffModel(const PlannerConfig& config, int state_dim)
    : config_(config), state_dim_(state_dim), encoder_("qdiff", state_dim, config) {}

QdiffBatch QdiffModel::make_batch(const std::vector<WindowRef>& windows) const {
  check_windows(windows);
  const int W = config_.window;
  const int L = config_.horizon;
  const auto rows = static_cast<Eigen::Index>(windows.size()) * W;
  QdiffBatch b;
  b.tokens = Eigen::MatrixXd::Zero(rows, state_dim_);
  b.targets = Eigen::MatrixXd::Zero(rows, L);
  b.mask = Eigen::MatrixXd::Zero(rows, L);
  for (std::size_t w = 0; w < windows.size(); ++w) {
    const auto& ep = *windows[w].episode;
    const auto* labels = windows[w].labels;
    if (labels == nullptr || labels->size() != ep.length()) throw ShapeError("qdiff model: one label per step");
    if (ep.states.cols() != state_dim_) throw ShapeError("qdiff model: state width mismatch");
    const int end = windows[w].end;
    const int start = std::max(0, end - W);
    b.lengths.push_back(end - start);
    for (int k = start; k < end; ++k) {
      const auto r = static_cast<Eigen::Index>(w) * W + (k - start);
      b.tokens.row(r) = ep.states.row(k);
      for (int j = 0; j < L && k + j < ep.length(); ++j) {
        b.targets(r, j) = (*labels)(k + j);
        b.mask(r, j) = 1.0;
      }
    }
  }
  return b;
}

Var QdiffModel::loss(Tape& tape, ParamStore& store, const QdiffBatch& batch) const {
  auto masked = tensor::mul(forward(tape, store, batch.tokens, batch.lengths), tape.constant(batch.mask));
  return tensor::weighted_sse(masked, batch.targets.cwiseProduct(batch.mask), Eigen::VectorXd::Ones(batch.mask.rows()),
                              batch.mask.sum());
}

double QdiffModel::loss_value(const ParamStore& store, const QdiffBatch& batch) const {
  Tape tape(false);
  const auto f = forward(tape, store, batch.tokens, batch.lengths).value();
  return ((f - batch.targets).array().square() * batch.mask.array()).sum() / batch.mask.sum();
}

Eigen::VectorXd QdiffModel::predict(const ParamStore& store, const Eigen::MatrixXd& states) const {
  const auto k = states.rows();
  if (k < 1) throw DomainError("qdiff model: empty window");
  if (k > config_.window || states.cols() != state_dim_) throw ShapeError("qdiff model: window shape mismatch");
  Eigen::MatrixXd tokens = Eigen::MatrixXd::Zero(config_.window, state_dim_);
  tokens.topRows(k) = states;
  Tape tape(false);
  return forward(tape, store, tokens, {k}).value().row(k - 1).transpose();
}

}  // namespace wolfpack::planner
