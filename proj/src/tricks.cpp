#include "tricks.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace erc {

double sigmoid(double x) {
  if (x >= 0.0) {
    return 1.0 / (1.0 + std::exp(-x));
  }
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double clamp_disc(double d) {
  return std::clamp(d, kDiscClamp, 1.0 - kDiscClamp);
}

double density_ratio(double log_pi, double log_b) {
  return std::min(0.5, sigmoid(log_pi - log_b));
}

double density_ratio_grad(double log_pi, double log_b) {
  const double x = log_pi - log_b;
  if (x >= 0.0) return 0.0;  // clamped branch
  const double s = sigmoid(x);
  return s * (1.0 - s);
}

double discriminator_loss(double D_s, double d_hat) {
  const double d = clamp_disc(D_s);
  return -d_hat * std::log(d) - (1.0 - d_hat) * std::log(1.0 - d);
}

void pi_gain_update(PiGainState& state, std::span<const double> d_hat,
                    std::vector<double>& omega_out) {
  if (d_hat.empty()) throw std::invalid_argument("pi_gain_update: empty batch");
  double p_mean = 0.0;
  for (double d : d_hat) p_mean += state.eta_c * (1.0 - 2.0 * d);
  p_mean /= static_cast<double>(d_hat.size());
  state.integral = std::max(0.0, 0.5 * state.integral + p_mean);
  omega_out.resize(d_hat.size());
  for (std::size_t i = 0; i < d_hat.size(); ++i) {
    const double p = state.eta_c * (1.0 - 2.0 * d_hat[i]);
    omega_out[i] = std::max(0.0, p + state.integral);
  }
}

double counteraction_term(double omega, double d, double D_s) {
  const double dd = clamp_disc(D_s);
  return omega * d * (std::log(dd) - std::log(1.0 - dd));
}

double mining_prob(double d_hat, double D_hat, double eta_m) {
  const double m = std::min(d_hat, D_hat);
  return 2.0 * std::max(0.0, 0.5 - std::pow(m, eta_m));
}

bool mining_mask(double p, Rng& rng) {
  return p <= rng.uniform();
}

}  // namespace erc
