#pragma once

#include <span>
#include <vector>

#include "rng.hpp"

namespace erc {

// Discriminator outputs are clamped away from {0, 1} before any log.
inline constexpr double kDiscClamp = 1e-6;

double sigmoid(double x);
double clamp_disc(double d);

// On-policyness ratio d = min(0.5, sigmoid(log_pi - log_b)).
// 0.5 means the current policy explains the stored action at least as
// well as the behavior policy did; the min is a hard clamp.
double density_ratio(double log_pi, double log_b);
// d(density_ratio)/d(log_pi); exactly zero while clamped.
double density_ratio_grad(double log_pi, double log_b);

// Bernoulli negative log-likelihood of D_s against the (detached)
// target d_hat.
double discriminator_loss(double D_s, double d_hat);

// PI controller state for the counteraction gain. The integral term
// starts at zero and can never go negative.
struct PiGainState {
  double integral = 0.0;
  double eta_c = 0.5;
};

// P_i = eta_c * (1 - 2 d_hat_i); I' = max(0, 0.5 I + mean(P));
// omega_i = max(0, P_i + I'). Uses the refreshed integral within the
// same batch.
void pi_gain_update(PiGainState& state, std::span<const double> d_hat,
                    std::vector<double>& omega_out);

// Per-sample counteraction term omega * d * (ln D - ln(1 - D)).
// omega and D act as gradient-free gains; only d carries a gradient.
double counteraction_term(double omega, double d, double D_s);

// Dropout probability p = 2 max(0, 0.5 - min(d_hat, D_hat)^eta_m).
double mining_prob(double d_hat, double D_hat, double eta_m);

// Keep mask: M = 1 iff p <= eps with eps ~ U(0, 1).
bool mining_mask(double p, Rng& rng);

}  // namespace erc
