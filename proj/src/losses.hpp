#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "gaussian.hpp"
#include "linalg.hpp"
#include "mlp.hpp"
#include "replay.hpp"

namespace erc {

// delta = r + gamma * (1 - done) * vbar(s') - v(s)
double td_error(double r, bool done, double v_s, double vbar_next,
                double gamma);

// Per-sample clipped surrogate: -min(rho * adv, clip(rho) * adv) with
// rho = exp(log_pi - log_b). adv is detached. Writes the gradient with
// respect to log_pi (exactly zero on the clipped branch).
double ppo_clip_loss_term(double log_pi, double log_b, double adv, double eps,
                          double* dlogpi);

// --- batched diagonal-Gaussian policy evaluation ---------------------

struct PolicyBatchEval {
  MlpCache cache;           // head = cache.acts.back(), raw outputs
  Matrix z;                 // (a - mean) / sigma
  Matrix log_std;           // clamped
  Matrix sigma;             // exp(log_std)
  std::vector<double> log_pi;
};

void policy_eval(const Mlp& pi_mlp, int act_dim, const ParameterSet& params,
                 const Matrix& states, const Matrix& actions,
                 PolicyBatchEval& out);

// Accumulates d<log_pi, dlogpi> / d(params) into grads.
void policy_backprop(const Mlp& pi_mlp, int act_dim,
                     const ParameterSet& params, const PolicyBatchEval& eval,
                     std::span<const double> dlogpi,
                     std::vector<double>& grads);

// --- A2C / PPO-clip over a replayed minibatch ------------------------

struct ValueLossResult {
  double loss = 0.0;
  int used = 0;  // rows that contributed (mask)
};

// Masked mean of 0.5 * delta^2; gradient flows into v only, vbar is the
// frozen target. deltas_out (unmasked) feeds the policy loss, detached.
ValueLossResult a2c_value_loss_batch(const Mlp& v_mlp, const ParameterSet& v,
                                     const ParameterSet& vbar,
                                     const Batch& batch, double gamma,
                                     std::span<const std::uint8_t> mask,
                                     std::vector<double>* v_grads,
                                     std::vector<double>* deltas_out);

struct PolicyLossResult {
  double total = 0.0;
  double pg = 0.0;             // masked likelihood / clipped term
  double counteraction = 0.0;  // full-batch regularizer
  double entropy = 0.0;        // closed-form mean entropy
  int kept = 0;
};

// Masked policy-gradient term plus the counteraction regularizer.
// deltas_hat, omega and disc_vals are gradient-free inputs; the policy
// gradient reaches the parameters only through log_pi (and through the
// density ratio inside the counteraction term).
PolicyLossResult a2c_policy_loss_batch(
    const Mlp& pi_mlp, int act_dim, const ParameterSet& pi_params,
    const Batch& batch, const PolicyBatchEval& eval,
    std::span<const double> deltas_hat, std::span<const std::uint8_t> mask,
    std::span<const double> omega, std::span<const double> disc_vals,
    bool ppo_clip, double clip_eps, std::vector<double>* pi_grads);

// --- experience discriminator -----------------------------------------

// Clamped sigmoid outputs D(s) for a batch of states.
void disc_forward(const Mlp& d_mlp, const ParameterSet& d_params,
                  const Matrix& states, std::vector<double>& values_out);

// Mean Bernoulli NLL against detached targets d_hat; grads into D only.
double disc_loss_batch(const Mlp& d_mlp, const ParameterSet& d_params,
                       const Matrix& states, std::span<const double> d_hat,
                       std::vector<double>* d_grads);

// --- SAC ---------------------------------------------------------------

struct SacCriticResult {
  double loss = 0.0;
  double mean_log_pi_next = 0.0;
};

// Twin-critic regression onto the detached soft target
// y = r + gamma (1-done) (min_k qbar_k(s', a') - alpha log pi(a'|s')),
// with a' squashed-resampled from fixed noise z_next.
SacCriticResult sac_critic_loss_batch(
    const Mlp& pi_mlp, int act_dim, const ParameterSet& pi_params,
    const Mlp& q_mlp, const ParameterSet& q1, const ParameterSet& q2,
    const ParameterSet& qbar1, const ParameterSet& qbar2, const Batch& batch,
    const Matrix& z_next, double alpha, double gamma,
    std::vector<double>* q1_grads, std::vector<double>* q2_grads);

struct SacActorResult {
  double loss = 0.0;
  double mean_log_pi = 0.0;
};

// Reparameterized actor loss mean(alpha log pi(a~|s) - min_k q_k(s, a~)).
// Gradients reach the policy parameters only; the critics act as a
// differentiable map of the action.
SacActorResult sac_actor_loss_batch(const Mlp& pi_mlp, int act_dim,
                                    const ParameterSet& pi_params,
                                    const Mlp& q_mlp, const ParameterSet& q1,
                                    const ParameterSet& q2,
                                    const Matrix& states, const Matrix& z,
                                    double alpha,
                                    std::vector<double>* pi_grads);

}  // namespace erc
