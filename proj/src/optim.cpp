#include "optim.hpp"

#include <cmath>
#include <stdexcept>

#include "linalg.hpp"

namespace erc {

AdamState adam_init(std::size_t n, double lr) {
  if (lr <= 0.0) throw std::invalid_argument("adam: lr must be positive");
  AdamState s;
  s.m.assign(n, 0.0);
  s.v.assign(n, 0.0);
  s.lr = lr;
  return s;
}

bool adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads) {
  const std::size_t n = params.size();
  if (state.m.size() != n || grads.size() != n)
    throw std::invalid_argument("adam: size mismatch");
  if (!all_finite(grads.data(), n)) return false;

  state.t += 1;
  const double c1 = 1.0 - std::pow(state.beta1, static_cast<double>(state.t));
  const double c2 = 1.0 - std::pow(state.beta2, static_cast<double>(state.t));
  const double b1 = state.beta1, b2 = state.beta2;
  for (std::size_t i = 0; i < n; ++i) {
    const double g = grads[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * g;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * g * g;
    const double mhat = state.m[i] / c1;
    const double vhat = state.v[i] / c2;
    params[i] -= state.lr * mhat / (std::sqrt(vhat) + state.eps);
  }
  return true;
}

}  // namespace erc
