// Copyright 2026 The imitlab Authors.
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

#include <cmath>
#include <numbers>

#include "common/rng.hpp"
#include "envsim/env_config.hpp"
#include "gradcheck.hpp"
#include "sacagent/gaussian_policy.hpp"
#include "sacagent/policy_file.hpp"
#include "sacagent/sac.hpp"
#include "test_util.hpp"

using namespace imitlab;
using imitlab::testing::error_kind_of;
using imitlab::testing::flatten;
using imitlab::testing::numeric_grad;
using imitlab::testing::rel_err;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index r, Eigen::Index c, Rng& rng, double scale = 1.0) {
  Eigen::MatrixXd m(r, c);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = scale * standard_normal(rng);
  return m;
}

void randomize_biases(Mlp& p, Rng& rng) {
  for (auto& l : p.layers) l.bias = random_matrix(l.out_dim(), 1, rng, 0.2);
}

double normal_logpdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

}  // namespace

TEST_CASE("squashed density integrates to one") {
  const std::pair<double, double> cases[] = {{0.0, 0.0}, {0.3, std::log(0.5)}, {-0.8, std::log(0.3)}};
  for (auto [m, ls] : cases) {
    Eigen::VectorXd mean(1), log_std(1), a(1);
    mean << m;
    log_std << ls;
    const int n = 200000;
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      a[0] = -1.0 + (i + 0.5) * (2.0 / n);
      total += std::exp(squashed_log_prob(mean, log_std, a)) * (2.0 / n);
    }
    CAPTURE(m);
    CHECK(total == doctest::Approx(1.0).epsilon(2e-3));
  }
}

TEST_CASE("squashed log-prob matches the change-of-variables oracle") {
  Eigen::VectorXd mean(2), log_std(2), a(2);
  mean << 0.2, -0.4;
  log_std << -0.5, 0.1;
  a << 0.35, -0.6;
  double expect = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double u = std::atanh(a[i]);
    expect += normal_logpdf(u, mean[i], std::exp(log_std[i])) - std::log(1.0 - a[i] * a[i] + kTanhLogEps);
  }
  CHECK(squashed_log_prob(mean, log_std, a) == doctest::Approx(expect).epsilon(1e-10));
}

TEST_CASE("sampled log-probs agree with the density") {
  Rng rng(1);
  const GaussianPolicy p = make_gaussian_policy(3, 2, 16, rng);
  const Eigen::MatrixXd obs = random_matrix(3, 6, rng);
  const PolicyForward f = policy_forward(p, obs);
  const SquashedSample s = squash_sample(f, draw_noise(2, 6, rng));
  for (Eigen::Index j = 0; j < 6; ++j) {
    CHECK(s.action.col(j).cwiseAbs().maxCoeff() < 1.0);
    const double lp = squashed_log_prob(f.mean().col(j), f.log_std.col(j), s.action.col(j));
    CHECK(s.log_prob[j] == doctest::Approx(lp).epsilon(1e-6));
  }
  CHECK((deterministic_actions(p, obs) - f.mean().array().tanh().matrix()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(f.log_std.maxCoeff() <= kLogStdMax);
  CHECK(f.log_std.minCoeff() >= kLogStdMin);
}

TEST_CASE("log-std is clamped") {
  Rng rng(2);
  GaussianPolicy p = make_gaussian_policy(2, 1, 8, rng);
  p.log_std_head.layers[0].bias[0] = 50.0;
  p.log_std_head.layers[0].weight.setZero();
  const PolicyForward f = policy_forward(p, Eigen::MatrixXd::Ones(2, 1));
  CHECK(f.log_std(0, 0) == kLogStdMax);
  CHECK(f.stddev(0, 0) == doctest::Approx(std::exp(kLogStdMax)));
}

TEST_CASE("critic loss gradients match central differences") {
  Rng rng(3);
  for (int trial = 0; trial < 5; ++trial) {
    TwinCritic c = make_twin_critic(3, 2, 8, rng);
    randomize_biases(c.q1, rng);
    randomize_biases(c.q2, rng);
    const Eigen::MatrixXd obs = random_matrix(3, 7, rng);
    const Eigen::MatrixXd act = random_matrix(2, 7, rng, 0.5);
    const Eigen::VectorXd y = random_matrix(7, 1, rng);
    const CriticLoss cl = critic_loss(c, obs, act, y);

    const Eigen::MatrixXd x = critic_input(obs, act);
    const double q1 = ((mlp_predict(c.q1, x).transpose() - y).array().square()).mean();
    const double q2 = ((mlp_predict(c.q2, x).transpose() - y).array().square()).mean();
    CHECK(cl.loss == doctest::Approx(0.5 * (q1 + q2)).epsilon(1e-10));

    auto f = [&] { return critic_loss(c, obs, act, y).loss; };
    CHECK(rel_err(flatten(cl.q1), numeric_grad(c.q1, f)) <= 1e-5);
    CHECK(rel_err(flatten(cl.q2), numeric_grad(c.q2, f)) <= 1e-5);
  }
}

TEST_CASE("policy loss gradients match central differences") {
  Rng rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    GaussianPolicy p = make_gaussian_policy(3, 2, 8, rng);
    randomize_biases(p.mean_net, rng);
    TwinCritic c = make_twin_critic(3, 2, 8, rng);
    const Eigen::MatrixXd obs = random_matrix(3, 5, rng);
    const Eigen::MatrixXd noise = draw_noise(2, 5, rng);
    const double alpha = 0.3;
    const PolicyLoss pl = policy_loss(p, c, obs, alpha, noise);

    // Oracle value from the sampling primitives.
    const SquashedSample s = squash_sample(policy_forward(p, obs), noise);
    const Eigen::MatrixXd x = critic_input(obs, s.action);
    const Eigen::MatrixXd qmin = mlp_predict(c.q1, x).cwiseMin(mlp_predict(c.q2, x));
    const double expect = (alpha * s.log_prob.array() - qmin.row(0).transpose().array()).mean();
    CHECK(pl.loss == doctest::Approx(expect).epsilon(1e-10));
    CHECK(pl.mean_log_prob == doctest::Approx(s.log_prob.mean()).epsilon(1e-10));

    auto f = [&] { return policy_loss(p, c, obs, alpha, noise).loss; };
    CAPTURE(trial);
    CHECK(rel_err(flatten(pl.mean_net), numeric_grad(p.mean_net, f)) <= 1e-4);
    CHECK(rel_err(flatten(pl.log_std_head), numeric_grad(p.log_std_head, f)) <= 1e-4);
  }
}

TEST_CASE("value target oracle") {
  Rng rng(5);
  const GaussianPolicy p = make_gaussian_policy(3, 1, 8, rng);
  const TwinCritic c = make_twin_critic(3, 1, 8, rng);
  const Eigen::MatrixXd next = random_matrix(3, 4, rng);
  Eigen::VectorXd r(4), done(4);
  r << 1.0, -2.0, 0.5, 0.0;
  done << 0.0, 1.0, 0.0, 0.0;
  const Eigen::MatrixXd noise = draw_noise(1, 4, rng);
  const Eigen::VectorXd y = value_target(c, p, next, r, done, 0.9, 0.2, noise);

  const SquashedSample s = squash_sample(policy_forward(p, next), noise);
  const Eigen::MatrixXd x = critic_input(next, s.action);
  const Eigen::MatrixXd q1 = mlp_predict(c.q1, x), q2 = mlp_predict(c.q2, x);
  for (int j = 0; j < 4; ++j) {
    const double soft = std::min(q1(0, j), q2(0, j)) - 0.2 * s.log_prob[j];
    CHECK(y[j] == doctest::Approx(r[j] + (1.0 - done[j]) * 0.9 * soft).epsilon(1e-12));
  }
  CHECK(y[1] == r[1]);
}

TEST_CASE("temperature loss and update direction") {
  Eigen::VectorXd lp(3);
  lp << -0.2, 0.4, 0.1;
  const double target = -1.0;
  const double h = 1e-6;
  const double num = (alpha_loss(0.3 + h, lp, target) - alpha_loss(0.3 - h, lp, target)) / (2 * h);
  CHECK(alpha_loss_grad(lp, target) == doctest::Approx(num).epsilon(1e-8));

  // Entropy below target: alpha rises.
  AlphaState up = AlphaState::from_alpha(0.5);
  alpha_update(up, Eigen::VectorXd::Constant(3, 2.0), target, 1e-2);
  CHECK(up.alpha() > 0.5);
  // Entropy above target: alpha falls.
  Eigen::VectorXd lp2 = Eigen::VectorXd::Constant(3, -3.0);
  AlphaState down = AlphaState::from_alpha(0.5);
  alpha_update(down, lp2, target, 1e-2);
  CHECK(down.alpha() < 0.5);
  CHECK(AlphaState::from_alpha(0.25).alpha() == doctest::Approx(0.25));
}

TEST_CASE("polyak update") {
  Rng rng(6);
  const Mlp online = make_mlp({3, 4, 1}, rng);
  const Mlp start = make_mlp({3, 4, 1}, rng);
  Mlp t = start;
  polyak_update(t, online, 0.0);
  CHECK(t == start);
  polyak_update(t, online, 1.0);
  CHECK(t == online);
  t = start;
  polyak_update(t, online, 0.25);
  for (std::size_t k = 0; k < t.layers.size(); ++k) {
    const Eigen::MatrixXd w = 0.75 * start.layers[k].weight + 0.25 * online.layers[k].weight;
    CHECK((t.layers[k].weight - w).cwiseAbs().maxCoeff() <= 1e-15);
  }
}

TEST_CASE("replay buffer wraps and gathers") {
  ReplayBuffer buf(3, 2, 1);
  for (int i = 0; i < 5; ++i) {
    buf.add(Eigen::VectorXd::Constant(2, i), Eigen::VectorXd::Constant(1, -i), 10.0 * i,
            Eigen::VectorXd::Constant(2, i + 1), i == 4);
  }
  CHECK(buf.size() == 3);
  CHECK(buf.capacity() == 3);
  // Slots hold transitions 3, 4, 2.
  const auto b = buf.gather({0, 1, 2});
  CHECK(b.obs(0, 0) == 3.0);
  CHECK(b.obs(0, 1) == 4.0);
  CHECK(b.obs(0, 2) == 2.0);
  CHECK(b.actions(0, 1) == -4.0);
  CHECK(b.rewards[0] == 30.0);
  CHECK(b.next_obs(1, 2) == 3.0);
  CHECK(b.done[1] == 1.0);
  CHECK(b.done[0] == 0.0);

  Rng rng(7);
  const auto s = buf.sample(64, rng);
  CHECK(s.obs.cols() == 64);
  for (Eigen::Index j = 0; j < 64; ++j) CHECK(s.next_obs(0, j) == s.obs(0, j) + 1.0);
}

TEST_CASE("policy checkpoint round trip and corruption") {
  Rng rng(8);
  PolicyFile f;
  f.policy = make_gaussian_policy(3, 1, 16, rng);
  f.critics = make_twin_critic(3, 1, 16, rng);
  f.header = {{"env", "pendulum"}, {"seed", 4}};
  const std::string bytes = encode_policy_file(f);
  const PolicyFile g = decode_policy_file(bytes);
  CHECK(g.policy == f.policy);
  REQUIRE(g.critics.has_value());
  CHECK(*g.critics == *f.critics);
  CHECK(g.header == f.header);
  CHECK(encode_policy_file(g) == bytes);

  for (std::size_t pos : {std::size_t{2}, bytes.size() / 2, bytes.size() - 1}) {
    std::string bad = bytes;
    bad[pos] = static_cast<char>(bad[pos] ^ 0x40);
    CHECK(error_kind_of([&] { decode_policy_file(bad); }) == ErrorKind::Format);
  }
  CHECK(error_kind_of([&] { decode_policy_file(bytes.substr(0, bytes.size() - 9)); }) == ErrorKind::Format);

  PolicyFile h = f;
  h.critics.reset();
  h.header["seed"] = 5;
  CHECK(decode_policy_file(encode_policy_file(h)).critics.has_value() == false);
  CHECK(policy_hash(h.policy) == policy_hash(f.policy));
  CHECK(hash_hex(policy_hash(f.policy)).size() == 16);
  h.policy.mean_net.layers[0].bias[0] += 1e-12;
  CHECK(policy_hash(h.policy) != policy_hash(f.policy));
  CHECK(error_kind_of([] { load_policy_file("/nonexistent/p.pol"); }) == ErrorKind::MissingArtifact);
}

TEST_CASE("short SAC run is deterministic in its seed") {
  const EnvConfig cfg = default_config(EnvName::Pendulum);
  SacConfig sc;
  sc.total_steps = 400;
  sc.warmup_steps = 100;
  sc.batch_size = 16;
  sc.hidden = 16;
  sc.buffer_capacity = 1000;
  const SacResult a = sac_train(cfg, sc, 11);
  const SacResult b = sac_train(cfg, sc, 11);
  const SacResult c = sac_train(cfg, sc, 12);
  CHECK(a.policy == b.policy);
  CHECK(a.critics == b.critics);
  CHECK(a.episode_returns == b.episode_returns);
  CHECK(!(a.policy == c.policy));
  CHECK(a.steps == 400);
  CHECK(a.episode_returns.size() == 2);
  CHECK(a.final_alpha > 0.0);
  CHECK(a.final_alpha != 1.0);

  // Warm start with critics continues from the given weights.
  SacWarmStart w{a.policy, a.critics};
  const SacResult d = sac_train(cfg, sc, 11, &w);
  CHECK(d.policy.obs_dim() == a.policy.obs_dim());
  SacConfig bad = sc;
  bad.tau = 1.5;
  CHECK(error_kind_of([&] { validate_sac_config(bad); }) == ErrorKind::InvalidArgument);
}
