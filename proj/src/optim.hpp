#pragma once

#include <cstddef>
#include <vector>

namespace erc {

struct AdamState {
  std::vector<double> m;
  std::vector<double> v;
  long long t = 0;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState adam_init(std::size_t n, double lr = 1e-3);

// Standard Adam with bias correction. Returns false (and leaves both
// state and params untouched) when the gradient has a non-finite entry;
// callers count those skips.
bool adam_step(AdamState& state, std::vector<double>& params,
               const std::vector<double>& grads);

}  // namespace erc
