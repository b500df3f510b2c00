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

#include <array>
#include <cmath>
#include <random>
#include <vector>

#include "wolfpack/errors.hpp"
#include "wolfpack/learner/agent_net.hpp"
#include "wolfpack/learner/control.hpp"
#include "wolfpack/learner/mixer.hpp"
#include "wolfpack/learner/td_loss.hpp"
#include "wolfpack/tensor/gradcheck.hpp"

using namespace wolfpack;
using namespace wolfpack::learner;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd sigm(const MatrixXd& x) { return (1.0 / (1.0 + (-x.array()).exp())).matrix(); }

MatrixXd affine(const ParamStore& s, const std::string& p, const MatrixXd& x) {
  return (x * s.at(p + ".w").value).rowwise() + s.at(p + ".b").value.row(0);
}

// Plain Eigen forward of FC -> ReLU -> GRU -> FC for a single row.
std::pair<VectorXd, VectorXd> reference_agent(const ParamStore& s, const VectorXd& in, const VectorXd& h) {
  const MatrixXd x = affine(s, "agent.fc1", in.transpose()).cwiseMax(0.0);
  const MatrixXd hr = h.transpose();
  const auto H = hr.cols();
  const MatrixXd gi = affine(s, "agent.gru.in", x);
  const MatrixXd gh = affine(s, "agent.gru.hid", hr);
  const MatrixXd r = sigm(gi.leftCols(H) + gh.leftCols(H));
  const MatrixXd z = sigm(gi.middleCols(H, H) + gh.middleCols(H, H));
  const MatrixXd n = (gi.rightCols(H) + r.cwiseProduct(gh.rightCols(H))).array().tanh().matrix();
  const MatrixXd hn = (1.0 - z.array()).matrix().cwiseProduct(n) + z.cwiseProduct(hr);
  return {affine(s, "agent.fc2", hn).row(0).transpose(), hn.row(0).transpose()};
}

double elu(double x) { return x > 0 ? x : std::expm1(x); }

// Scalar reference QMIX.
double reference_qmix(const ParamStore& s, const MixerConfig& c, const VectorXd& q, const VectorXd& st) {
  const MatrixXd x = st.transpose();
  const MatrixXd w1 = affine(s, "mixer.hyper_w1.1", affine(s, "mixer.hyper_w1.0", x).cwiseMax(0.0)).cwiseAbs();
  const MatrixXd w2 = affine(s, "mixer.hyper_w2.1", affine(s, "mixer.hyper_w2.0", x).cwiseMax(0.0)).cwiseAbs();
  const MatrixXd b1 = affine(s, "mixer.hyper_b1", x);
  const double v = affine(s, "mixer.v.1", affine(s, "mixer.v.0", x).cwiseMax(0.0))(0, 0);
  double out = v;
  for (int e = 0; e < c.embed; ++e) {
    double pre = b1(0, e);
    for (int i = 0; i < c.n_agents; ++i) pre += q(i) * w1(0, i * c.embed + e);
    out += elu(pre) * w2(0, e);
  }
  return out;
}

MixerConfig small_qmix(int n, int S) {
  MixerConfig c;
  c.kind = MixerKind::kQmix;
  c.n_agents = n;
  c.state_dim = S;
  c.embed = 4;
  c.hypernet_embed = 8;
  return c;
}

EpisodeRecord random_episode(int n, int d, int T, std::mt19937_64& rng, bool terminal = true) {
  std::normal_distribution<double> g;
  std::uniform_int_distribution<int> a(0, 4);
  EpisodeRecord ep;
  ep.n_agents = n;
  ep.obs_dim = d;
  ep.states = MatrixXd(T + 1, n * d);
  for (Eigen::Index k = 0; k < ep.states.size(); ++k) ep.states.data()[k] = g(rng);
  ep.actions.resize(T, n);
  for (Eigen::Index k = 0; k < ep.actions.size(); ++k) ep.actions.data()[k] = a(rng);
  ep.original_actions = ep.actions;
  ep.attacked = Eigen::MatrixXi::Zero(T, n);
  ep.rewards = VectorXd(T);
  for (int t = 0; t < T; ++t) ep.rewards(t) = g(rng);
  ep.done = Eigen::VectorXi::Zero(T);
  if (terminal) ep.done(T - 1) = 1;
  return ep;
}

}  // namespace

TEST_CASE("agent network matches a plain Eigen composition over several steps") {
  AgentNetConfig cfg{.obs_dim = 6, .n_agents = 3, .n_actions = 5, .hidden = 7};
  AgentNet net(cfg);
  std::mt19937_64 rng(3);
  ParamStore store;
  net.init(store, rng);
  CHECK(store.contains("agent.fc1.w"));
  CHECK(store.at("agent.gru.in.w").value.rows() == 7);
  CHECK(store.at("agent.gru.in.w").value.cols() == 21);

  std::normal_distribution<double> g;
  MatrixXd hidden = net.initial_hidden(3);
  std::vector<int> last{-1, -1, -1};
  for (int t = 0; t < 4; ++t) {
    MatrixXd obs(3, 6);
    for (Eigen::Index k = 0; k < obs.size(); ++k) obs.data()[k] = g(rng);
    const std::vector<int> ids{0, 1, 2};
    const MatrixXd in = net.build_inputs(obs, last, ids);
    CHECK(in.cols() == cfg.input_width());
    const auto out = net.agent_q(store, obs, last, hidden);
    for (int i = 0; i < 3; ++i) {
      CHECK(in.row(i).segment(6, 5).sum() == (last[i] < 0 ? 0.0 : 1.0));
      CHECK(in(i, 11 + i) == 1.0);
      auto [q, h] = reference_agent(store, in.row(i).transpose(), hidden.row(i).transpose());
      CHECK((out.q.row(i).transpose() - q).cwiseAbs().maxCoeff() < 1e-12);
      CHECK((out.hidden.row(i).transpose() - h).cwiseAbs().maxCoeff() < 1e-12);
    }
    hidden = out.hidden;
    last = {t % 5, (t + 1) % 5, (t + 3) % 5};
  }
}

TEST_CASE("agent network: zero parameters give zero values; bad inputs are rejected") {
  AgentNet net({.obs_dim = 4, .n_agents = 2, .n_actions = 5, .hidden = 3});
  std::mt19937_64 rng(1);
  ParamStore store;
  net.init(store, rng);
  for (auto& e : store.entries()) e.value.setZero();
  const std::vector<int> last{-1, 2};
  auto out = net.agent_q(store, MatrixXd::Ones(2, 4), last, net.initial_hidden(2));
  CHECK(out.q.isZero(0.0));
  CHECK(out.q.rows() == 2);
  CHECK(out.q.cols() == 5);
  const std::vector<int> bad{7, 0};
  CHECK_THROWS_AS(net.agent_q(store, MatrixXd::Ones(2, 4), bad, net.initial_hidden(2)), DomainError);
  CHECK_THROWS_AS(net.agent_q(store, MatrixXd::Ones(2, 3), last, net.initial_hidden(2)), ShapeError);

  QOutput bad_q{MatrixXd::Constant(1, 5, std::nan("")), MatrixXd::Zero(1, 3)};
  CHECK_THROWS_AS(bad_q.check(), TrainingError);
  QOutput big_q{MatrixXd::Constant(1, 5, 1e9), MatrixXd::Zero(1, 3)};
  CHECK_THROWS_AS(big_q.check(), TrainingError);
}

TEST_CASE("VDN mixes by summation") {
  Mixer vdn({.kind = MixerKind::kVdn, .n_agents = 3, .state_dim = 2});
  ParamStore store;
  std::mt19937_64 rng(0);
  vdn.init(store, rng);
  CHECK(store.size() == 0);
  VectorXd q(3);
  q << 1.5, -2.0, 0.25;
  CHECK(vdn.evaluate(store, q, VectorXd::Zero(2)) == doctest::Approx(-0.25));
  CHECK(mix_vdn(q) == doctest::Approx(-0.25));
  CHECK(vdn.grad_q(store, q, VectorXd::Zero(2)) == VectorXd::Ones(3));
  CHECK(parse_mixer_kind("vdn") == MixerKind::kVdn);
  CHECK(to_string(parse_mixer_kind("qmix")) == "qmix");
  CHECK_THROWS_AS(parse_mixer_kind("sum"), ConfigError);
}

TEST_CASE("QMIX matches a scalar reference implementation") {
  const auto cfg = small_qmix(3, 5);
  Mixer mixer(cfg);
  std::mt19937_64 rng(11);
  ParamStore store;
  mixer.init(store, rng);
  std::normal_distribution<double> g;
  for (int k = 0; k < 50; ++k) {
    VectorXd q(3), s(5);
    for (auto& x : q) x = 3 * g(rng);
    for (auto& x : s) x = g(rng);
    CHECK(mixer.evaluate(store, q, s) == doctest::Approx(reference_qmix(store, cfg, q, s)).epsilon(1e-12));
  }
}

TEST_CASE("QMIX with hand-set hypernetwork outputs") {
  // Single-layer hypernets with zero weights make every output equal to its bias.
  MixerConfig cfg{.kind = MixerKind::kQmix, .n_agents = 2, .state_dim = 1, .embed = 1, .hypernet_layers = 1};
  Mixer mixer(cfg);
  std::mt19937_64 rng(2);
  ParamStore store;
  mixer.init(store, rng);
  for (auto& e : store.entries()) e.value.setZero();
  store.at("mixer.hyper_w1.0.b").value << -2.0, 3.0;  // |w1| = (2, 3)
  store.at("mixer.hyper_w2.0.b").value << -0.5;       // |w2| = 0.5
  store.at("mixer.hyper_b1.b").value << 1.0;
  store.at("mixer.v.1.b").value << 4.0;
  VectorXd q(2);
  q << 1.0, -2.0;  // pre = 2 - 6 + 1 = -3
  const double expected = 4.0 + 0.5 * std::expm1(-3.0);
  VectorXd s = VectorXd::Zero(1);
  CHECK(mixer.evaluate(store, q, s) == doctest::Approx(expected).epsilon(1e-14));
  q << 2.0, 1.0;  // pre = 4 + 3 + 1 = 8
  CHECK(mixer.evaluate(store, q, s) == doctest::Approx(8.0));
  const VectorXd grad = mixer.grad_q(store, q, s);
  CHECK(grad(0) == doctest::Approx(0.5 * 2.0));
  CHECK(grad(1) == doctest::Approx(0.5 * 3.0));
}

TEST_CASE("QMIX is monotone in every agent value") {
  const auto cfg = small_qmix(3, 4);
  Mixer mixer(cfg);
  std::mt19937_64 rng(21);
  std::normal_distribution<double> g;
  int checked = 0;
  for (int draw = 0; draw < 1000; ++draw) {
    ParamStore store;
    mixer.init(store, rng);
    VectorXd q(3), s(4);
    for (auto& x : q) x = 5 * g(rng);
    for (auto& x : s) x = g(rng);
    const VectorXd grad = mixer.grad_q(store, q, s);
    for (int i = 0; i < 3; ++i) {
      const double h = 1e-5;
      VectorXd up = q, dn = q;
      up(i) += h;
      dn(i) -= h;
      const double fd = (mixer.evaluate(store, up, s) - mixer.evaluate(store, dn, s)) / (2 * h);
      CHECK(fd >= -1e-9);
      CHECK(grad(i) >= 0.0);
      CHECK(std::abs(fd - grad(i)) <= 1e-6 * (1 + std::abs(fd)));
      ++checked;
    }
  }
  CHECK(checked == 3000);
}

TEST_CASE("IGM: per-agent greedy actions maximize the mixed value") {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (auto kind : {MixerKind::kVdn, MixerKind::kQmix}) {
    for (int n = 1; n <= 3; ++n) {
      auto cfg = small_qmix(n, 3);
      cfg.kind = kind;
      Mixer mixer(cfg);
      for (int trial = 0; trial < 20; ++trial) {
        ParamStore store;
        mixer.init(store, rng);
        MatrixXd q(n, 5);
        for (Eigen::Index k = 0; k < q.size(); ++k) q.data()[k] = g(rng);
        VectorXd s(3);
        for (auto& x : s) x = g(rng);
        VectorXd greedy(n);
        for (int i = 0; i < n; ++i) greedy(i) = q(i, argmax(q.row(i).transpose()));
        const double best = mixer.evaluate(store, greedy, s);
        int joints = 1;
        for (int i = 0; i < n; ++i) joints *= 5;
        MatrixXd all(joints, n);
        for (int j = 0; j < joints; ++j) {
          int code = j;
          for (int i = 0; i < n; ++i, code /= 5) all(j, i) = q(i, code % 5);
        }
        CHECK(mixer.evaluate(store, all, s).maxCoeff() <= best + 1e-12);
      }
    }
  }
}

TEST_CASE("argmax/argmin break ties toward the lowest index") {
  VectorXd q(5);
  q << 1, 3, 3, -1, -1;
  CHECK(argmax(q) == 1);
  CHECK(argmin(q) == 3);
  std::mt19937_64 rng(0);
  CHECK(select_action(q, 0.0, rng) == 1);
}

TEST_CASE("select_action: epsilon-greedy frequencies") {
  VectorXd q(5);
  q << 0, 0, 9, 0, 0;
  std::mt19937_64 rng(17);
  const int draws = 100000;
  std::array<int, 5> uniform{}, mixed{};
  for (int k = 0; k < draws; ++k) {
    ++uniform[select_action(q, 1.0, rng)];
    ++mixed[select_action(q, 0.3, rng)];
  }
  for (int a = 0; a < 5; ++a) {
    CHECK(std::abs(uniform[a] / double(draws) - 0.2) < 0.01);
    const double expected = 0.3 / 5 + (a == 2 ? 0.7 : 0.0);
    CHECK(std::abs(mixed[a] / double(draws) - expected) < 0.01);
  }
  CHECK_THROWS_AS(select_action(q, 1.5, rng), DomainError);
}

TEST_CASE("epsilon schedule is linear then constant") {
  EpsilonSchedule eps;
  CHECK(eps(0) == doctest::Approx(1.0));
  CHECK(eps(25000) == doctest::Approx(0.525));
  CHECK(eps(50000) == doctest::Approx(0.05));
  CHECK(eps(10000000) == doctest::Approx(0.05));
  for (long t = 0; t < 60000; t += 997) CHECK(eps(t + 997) <= eps(t));
}

TEST_CASE("EMA target update") {
  std::mt19937_64 rng(9);
  AgentNet net({.obs_dim = 3, .n_agents = 2, .n_actions = 5, .hidden = 4});
  ParamStore online, target;
  net.init(online, rng);
  net.init(target, rng);
  const ParamStore before = target;

  auto dist = [](const ParamStore& a, const ParamStore& b) {
    double d = 0;
    for (std::size_t k = 0; k < a.size(); ++k) d += (a.entries()[k].value - b.entries()[k].value).squaredNorm();
    return std::sqrt(d);
  };

  ParamStore t0 = before;
  ema_update(t0, online, 0.0);
  CHECK(dist(t0, before) == 0.0);
  ParamStore t1 = before;
  ema_update(t1, online, 1.0);
  CHECK(dist(t1, online) == 0.0);

  ParamStore t = before;
  const double d0 = dist(t, online);
  ema_update(t, online, 0.005);
  CHECK(dist(t, online) == doctest::Approx(0.995 * d0).epsilon(1e-12));
  for (std::size_t k = 0; k < t.size(); ++k) {
    const MatrixXd expect = 0.995 * before.entries()[k].value + 0.005 * online.entries()[k].value;
    CHECK((t.entries()[k].value - expect).cwiseAbs().maxCoeff() < 1e-15);
  }

  ParamStore h = before;
  hard_update(h, online);
  CHECK(dist(h, online) == 0.0);

  ParamStore other;
  AgentNet({.obs_dim = 4, .n_agents = 2, .n_actions = 5, .hidden = 4}).init(other, rng);
  CHECK_THROWS_AS(ema_update(other, online, 0.5), ConfigError);
}

TEST_CASE("TD loss: hand-computed value for a single agent") {
  // One agent, VDN, two steps; the oracle walks the recurrent net step by step.
  AgentNet net({.obs_dim = 3, .n_agents = 1, .n_actions = 5, .hidden = 4});
  Mixer vdn({.kind = MixerKind::kVdn, .n_agents = 1, .state_dim = 3});
  std::mt19937_64 rng(12);
  ParamStore online, target;
  net.init(online, rng);
  net.init(target, rng);
  auto ep = random_episode(1, 3, 2, rng);
  const double gamma = 0.9;

  for (bool double_q : {true, false}) {
    std::vector<VectorXd> q_on, q_tg;
    MatrixXd h_on = net.initial_hidden(1), h_tg = net.initial_hidden(1);
    for (int t = 0; t <= 2; ++t) {
      const std::vector<int> last{t == 0 ? -1 : ep.actions(t - 1, 0)};
      auto a = net.agent_q(online, ep.observations(t), last, h_on);
      auto b = net.agent_q(target, ep.observations(t), last, h_tg);
      q_on.push_back(a.q.row(0).transpose());
      q_tg.push_back(b.q.row(0).transpose());
      h_on = a.hidden;
      h_tg = b.hidden;
    }
    const int a1 = double_q ? argmax(q_on[1]) : argmax(q_tg[1]);
    const double y0 = ep.rewards(0) + gamma * q_tg[1](a1);
    const double y1 = ep.rewards(1);  // terminal
    const double e0 = q_on[0](ep.actions(0, 0)) - y0;
    const double e1 = q_on[1](ep.actions(1, 0)) - y1;
    const double expected = (e0 * e0 + e1 * e1) / 2;

    const auto stats = td_loss({&ep}, net, vdn, online, target, {.gamma = gamma, .double_q = double_q});
    CHECK(stats.loss == doctest::Approx(expected).epsilon(1e-12));
    CHECK(stats.transitions == 2);
  }
}

TEST_CASE("TD loss: zero when rewards equal current predictions and gamma is zero") {
  AgentNet net({.obs_dim = 2, .n_agents = 2, .n_actions = 5, .hidden = 4});
  Mixer vdn({.kind = MixerKind::kVdn, .n_agents = 2, .state_dim = 4});
  std::mt19937_64 rng(4);
  ParamStore online, target;
  net.init(online, rng);
  net.init(target, rng);
  auto ep = random_episode(2, 2, 3, rng);
  MatrixXd h = net.initial_hidden(2);
  for (int t = 0; t < 3; ++t) {
    std::vector<int> last(2, -1);
    if (t > 0) last = {ep.actions(t - 1, 0), ep.actions(t - 1, 1)};
    auto out = net.agent_q(online, ep.observations(t), last, h);
    ep.rewards(t) = out.q(0, ep.actions(t, 0)) + out.q(1, ep.actions(t, 1));
    h = out.hidden;
  }
  const auto stats = td_loss({&ep}, net, vdn, online, target, {.gamma = 0.0});
  CHECK(stats.loss == doctest::Approx(0.0).epsilon(1e-20));
  CHECK(online.entries()[0].grad.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("TD loss: non-negative, masks ragged batches, matches finite differences") {
  std::mt19937_64 rng(6);
  AgentNet net({.obs_dim = 2, .n_agents = 2, .n_actions = 5, .hidden = 3});
  for (auto kind : {MixerKind::kVdn, MixerKind::kQmix}) {
    auto mcfg = small_qmix(2, 4);
    mcfg.kind = kind;
    Mixer mixer(mcfg);
    ParamStore online, target;
    net.init(online, rng);
    mixer.init(online, rng);
    net.init(target, rng);
    mixer.init(target, rng);
    auto e1 = random_episode(2, 2, 3, rng);
    auto e2 = random_episode(2, 2, 2, rng, false);
    std::vector<const EpisodeRecord*> batch{&e1, &e2};
    const TdConfig cfg{.gamma = 0.95};

    const auto stats = td_loss(batch, net, mixer, online, target, cfg);
    CHECK(stats.loss >= 0.0);
    CHECK(stats.transitions == 5);

    // Mean over episodes of equal weight per transition.
    const auto s1 = td_loss({&e1}, net, mixer, online, target, cfg);
    const auto s2 = td_loss({&e2}, net, mixer, online, target, cfg);
    CHECK(stats.loss == doctest::Approx((3 * s1.loss + 2 * s2.loss) / 5).epsilon(1e-12));

    const auto check = tensor::finite_diff_check<double>(
        [&](Tape& tape, ParamStore& p) { return td_loss_graph(tape, batch, net, mixer, p, target, cfg); }, online,
        1e-6, 1e-4);
    INFO(to_string(kind), " ", check.worst_param, " abs ", check.max_abs_error);
    CHECK(check.max_rel_error < 1e-5);
  }
}

TEST_CASE("TD loss: rejects malformed batches") {
  AgentNet net({.obs_dim = 2, .n_agents = 2, .n_actions = 5, .hidden = 3});
  Mixer vdn({.kind = MixerKind::kVdn, .n_agents = 2, .state_dim = 4});
  std::mt19937_64 rng(1);
  ParamStore online, target;
  net.init(online, rng);
  net.init(target, rng);
  CHECK_THROWS_AS(td_loss({}, net, vdn, online, target, {}), DomainError);
  auto wrong = random_episode(3, 2, 2, rng);
  CHECK_THROWS_AS(td_loss({&wrong}, net, vdn, online, target, {}), ShapeError);
}
