#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fd_suite.hpp"
#include "losses.hpp"
#include "optim.hpp"

using namespace erc;

namespace {

// A net whose output is identically `bias` regardless of the input.
ParameterSet constant_net(const Mlp& mlp, double bias) {
  ParameterSet p;
  p.values.assign(mlp.param_count(), 0.0);
  p.layout = mlp.layout();
  const auto& last = mlp.layout().back();
  p.values[last.b_off] = bias;
  return p;
}

MlpSpec tiny(int in, int out,
             OutputActivation oa = OutputActivation::linear) {
  MlpSpec s;
  s.input_dim = in;
  s.hidden_dims = {6};
  s.output_dim = out;
  s.output_activation = oa;
  return s;
}

Batch one_row_batch(int obs, int act, double r, bool done) {
  Batch b;
  b.s.resize(1, obs);
  b.a.resize(1, act);
  b.s_next.resize(1, obs);
  b.r = {r};
  b.log_b = {0.0};
  b.done = {static_cast<std::uint8_t>(done ? 1 : 0)};
  for (auto& v : b.s.data) v = 0.3;
  for (auto& v : b.s_next.data) v = -0.2;
  return b;
}

}  // namespace

TEST_CASE("td error closed forms") {
  CHECK(td_error(0, false, 0, 0, 0.99) == 0.0);
  CHECK(td_error(1, true, 0, 123.0, 0.99) == 1.0);
  CHECK(td_error(1, false, 5, 10, 0.99) == doctest::Approx(5.9).epsilon(1e-13));
}

TEST_CASE("value loss on constant nets") {
  Mlp v_mlp(tiny(2, 1));
  const auto v = constant_net(v_mlp, 5.0);
  const auto vbar = constant_net(v_mlp, 10.0);
  const Batch b = one_row_batch(2, 1, 1.0, false);

  auto res = a2c_value_loss_batch(v_mlp, v, vbar, b, 0.99, {}, nullptr, nullptr);
  CHECK(res.loss == doctest::Approx(0.5 * 5.9 * 5.9).epsilon(1e-12));

  // delta = 2 -> loss 2 ; delta = 0 -> loss 0 (minimum at v = r + g*vbar)
  const auto v2 = constant_net(v_mlp, 1.0 + 0.99 * 10.0 - 2.0);
  CHECK(a2c_value_loss_batch(v_mlp, v2, vbar, b, 0.99, {}, nullptr, nullptr)
            .loss == doctest::Approx(2.0).epsilon(1e-12));
  const auto vmin = constant_net(v_mlp, 1.0 + 0.99 * 10.0);
  CHECK(a2c_value_loss_batch(v_mlp, vmin, vbar, b, 0.99, {}, nullptr, nullptr)
            .loss == doctest::Approx(0.0).scale(1).epsilon(1e-12));

  // terminal removes the bootstrap
  const Batch bt = one_row_batch(2, 1, 1.0, true);
  const auto v0 = constant_net(v_mlp, 0.0);
  std::vector<double> deltas;
  a2c_value_loss_batch(v_mlp, v0, vbar, bt, 0.99, {}, nullptr, &deltas);
  CHECK(deltas[0] == 1.0);
}

TEST_CASE("a2c policy loss values") {
  // policy net emitting mean = 0.3, log_std = 0 for every state
  Mlp pi_mlp(tiny(2, 2));
  ParameterSet pi = constant_net(pi_mlp, 0.0);
  const auto& last = pi_mlp.layout().back();
  pi.values[last.b_off] = 0.3;  // mean head bias

  Batch b = one_row_batch(2, 1, 0.0, false);
  b.a.at(0, 0) = 0.3;  // action at the mean

  PolicyBatchEval ev;
  policy_eval(pi_mlp, 1, pi, b.s, b.a, ev);
  CHECK(ev.log_pi[0] == doctest::Approx(-0.91893853320467274).epsilon(1e-13));

  std::vector<double> dhat{1.0};
  auto res = a2c_policy_loss_batch(pi_mlp, 1, pi, b, ev, dhat, {}, {}, {},
                                   false, 0.2, nullptr);
  CHECK(res.total == doctest::Approx(0.91893853320467274).epsilon(1e-13));

  // zero advantage: zero loss and exactly zero gradient
  std::vector<double> zero_adv{0.0};
  std::vector<double> grads(pi_mlp.param_count(), 0.0);
  auto res0 = a2c_policy_loss_batch(pi_mlp, 1, pi, b, ev, zero_adv, {}, {},
                                    {}, false, 0.2, &grads);
  CHECK(res0.total == 0.0);
  for (double g : grads) CHECK(g == 0.0);
}

TEST_CASE("ppo clip term: branches and exact zero gradients") {
  double g = 0.0;

  // rho = 1: identical to the unclipped surrogate
  CHECK(ppo_clip_loss_term(-1.3, -1.3, 0.7, 0.2, &g) ==
        doctest::Approx(-0.7).epsilon(1e-13));
  CHECK(g == doctest::Approx(-0.7).epsilon(1e-13));

  // rho = 2, adv > 0: clipped at 1.2, gradient exactly zero
  const double lp2 = std::log(2.0);
  CHECK(ppo_clip_loss_term(lp2, 0.0, 1.0, 0.2, &g) ==
        doctest::Approx(-1.2).epsilon(1e-13));
  CHECK(g == 0.0);

  // rho = 0.5, adv < 0: clipped at 0.8, gradient exactly zero
  const double lph = std::log(0.5);
  CHECK(ppo_clip_loss_term(lph, 0.0, -1.0, 0.2, &g) ==
        doctest::Approx(0.8).epsilon(1e-13));
  CHECK(g == 0.0);

  // rho = 0.5, adv > 0: raw branch keeps its gradient
  CHECK(ppo_clip_loss_term(lph, 0.0, 1.0, 0.2, &g) ==
        doctest::Approx(-0.5).epsilon(1e-13));
  CHECK(g == doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("constructed batches give exactly zero clipped policy gradient") {
  Mlp pi_mlp(tiny(3, 2));
  ParameterSet pi = pi_mlp.init(4);
  Batch b;
  const int n = 8;
  b.s.resize(n, 3);
  b.a.resize(n, 1);
  b.r.assign(n, 0.0);
  b.done.assign(n, 0);
  b.log_b.resize(n);
  b.s_next.resize(n, 3);
  Rng r(2, 1);
  for (auto& v : b.s.data) v = r.uniform(-1, 1);
  for (auto& v : b.a.data) v = r.uniform(-1, 1);

  PolicyBatchEval ev;
  policy_eval(pi_mlp, 1, pi, b.s, b.a, ev);
  std::vector<double> adv(n);
  for (int i = 0; i < n; ++i) {
    if (i % 2 == 0) {
      b.log_b[i] = ev.log_pi[i] - std::log(2.0);  // rho = 2
      adv[i] = 1.5;                               // positive adv
    } else {
      b.log_b[i] = ev.log_pi[i] - std::log(0.5);  // rho = 0.5
      adv[i] = -0.8;                              // negative adv
    }
  }
  std::vector<double> grads(pi_mlp.param_count(), 0.0);
  a2c_policy_loss_batch(pi_mlp, 1, pi, b, ev, adv, {}, {}, {}, true, 0.2,
                        &grads);
  for (double gv : grads) CHECK(gv == 0.0);
}

TEST_CASE("sac critic special cases") {
  const int obs = 2, act = 1;
  Mlp pi_mlp(tiny(obs, 2));
  Mlp q_mlp(tiny(obs + act, 1));
  const auto pi = constant_net(pi_mlp, 0.0);
  const auto qz = constant_net(q_mlp, 0.0);

  Batch b = one_row_batch(obs, act, 1.0, false);
  Matrix z(1, 1);
  z.at(0, 0) = 0.4;

  // gamma = 0, r = 1, q = 0 -> loss = 0.5 * (1 + 1) = 1
  auto res = sac_critic_loss_batch(pi_mlp, act, pi, q_mlp, qz, qz, qz, qz, b,
                                   z, 0.2, 0.0, nullptr, nullptr);
  CHECK(res.loss == doctest::Approx(1.0).epsilon(1e-12));

  // done removes the bootstrap even with big targets
  Batch bt = one_row_batch(obs, act, 1.0, true);
  const auto qbig = constant_net(q_mlp, 7.0);
  auto rest = sac_critic_loss_batch(pi_mlp, act, pi, q_mlp, qz, qz, qbig,
                                    qbig, bt, z, 0.2, 0.99, nullptr, nullptr);
  CHECK(rest.loss == doctest::Approx(1.0).epsilon(1e-12));

  // target uses the elementwise min of the twin targets (alpha = 0)
  const auto qb1 = constant_net(q_mlp, 2.0);
  const auto qb2 = constant_net(q_mlp, -3.0);
  auto resm = sac_critic_loss_batch(pi_mlp, act, pi, q_mlp, qz, qz, qb1, qb2,
                                    b, z, 0.0, 0.99, nullptr, nullptr);
  const double y = 1.0 + 0.99 * (-3.0);
  CHECK(resm.loss == doctest::Approx(0.5 * 2.0 * y * y).epsilon(1e-12));
}

TEST_CASE("sac actor: constant critic and zero alpha give zero gradient") {
  const int obs = 2, act = 1;
  Mlp pi_mlp(tiny(obs, 2));
  Mlp q_mlp(tiny(obs + act, 1));
  ParameterSet pi = pi_mlp.init(8);
  const auto qc = constant_net(q_mlp, 3.3);

  Matrix states(4, obs), z(4, act);
  Rng r(5, 2);
  for (auto& v : states.data) v = r.uniform(-1, 1);
  for (auto& v : z.data) v = r.normal();

  std::vector<double> grads(pi_mlp.param_count(), 0.0);
  auto res = sac_actor_loss_batch(pi_mlp, act, pi, q_mlp, qc, qc, states, z,
                                  0.0, &grads);
  CHECK(res.loss == doctest::Approx(-3.3).epsilon(1e-12));
  for (double g : grads) CHECK(g == 0.0);
}

TEST_CASE("larger alpha trains toward higher entropy on a fixed critic") {
  const int obs = 2, act = 1;
  Mlp pi_mlp(tiny(obs, 2));
  Mlp q_mlp(tiny(obs + act, 1));
  const auto q = q_mlp.init(77);

  Matrix states(16, obs);
  Rng rs(6, 3);
  for (auto& v : states.data) v = rs.uniform(-1, 1);

  auto train = [&](double alpha) {
    ParameterSet pi = pi_mlp.init(8);
    AdamState adam = adam_init(pi_mlp.param_count(), 1e-2);
    std::vector<double> grads(pi_mlp.param_count());
    Rng rz(9, 4);
    Matrix z(16, act);
    double mean_log_pi = 0.0;
    for (int step = 0; step < 300; ++step) {
      for (auto& v : z.data) v = rz.normal();
      grads.assign(grads.size(), 0.0);
      auto res = sac_actor_loss_batch(pi_mlp, act, pi, q_mlp, q, q, states, z,
                                      alpha, &grads);
      adam_step(adam, pi.values, grads);
      mean_log_pi = res.mean_log_pi;
    }
    return -mean_log_pi;  // entropy estimate
  };
  CHECK(train(0.5) > train(0.02));
}

TEST_CASE("finite differences across every loss (quick pass)") {
  auto res = erc::testing::run_loss_fd_suite(4, 20);
  for (const auto& c : res.cases) {
    INFO(c.name, " rel err ", c.max_rel_err);
    CHECK(c.max_rel_err < 1e-4);
  }
}
