#include "gaussian.hpp"

#include <cmath>
#include <stdexcept>

namespace erc {

namespace {
constexpr double kLogTwoPi = 1.8378770664093454836;
}

PolicyOutput policy_head_split(const double* row, int act_dim) {
  PolicyOutput out;
  out.mean.assign(row, row + act_dim);
  out.log_std.resize(act_dim);
  for (int j = 0; j < act_dim; ++j) {
    double raw = row[act_dim + j];
    out.log_std[j] = raw < kLogStdMin ? kLogStdMin
                     : raw > kLogStdMax ? kLogStdMax
                                        : raw;
  }
  return out;
}

double gauss_log_prob(const PolicyOutput& out, std::span<const double> a) {
  if (a.size() != out.mean.size())
    throw std::invalid_argument("gauss_log_prob: dim mismatch");
  double lp = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double z = (a[j] - out.mean[j]) * std::exp(-out.log_std[j]);
    lp += -0.5 * kLogTwoPi - out.log_std[j] - 0.5 * z * z;
  }
  return lp;
}

ActionSample gauss_sample(const PolicyOutput& out, Rng& rng) {
  ActionSample s;
  const std::size_t d = out.mean.size();
  s.action.resize(d);
  for (std::size_t j = 0; j < d; ++j) {
    const double z = rng.normal();
    s.action[j] = out.mean[j] + std::exp(out.log_std[j]) * z;
    s.log_prob += -0.5 * kLogTwoPi - out.log_std[j] - 0.5 * z * z;
  }
  return s;
}

std::vector<double> gauss_rsample(const PolicyOutput& out,
                                  std::span<const double> z) {
  if (z.size() != out.mean.size())
    throw std::invalid_argument("gauss_rsample: dim mismatch");
  std::vector<double> a(z.size());
  for (std::size_t j = 0; j < z.size(); ++j)
    a[j] = out.mean[j] + std::exp(out.log_std[j]) * z[j];
  return a;
}

ActionSample tanh_squash(std::span<const double> u, double log_prob_pre) {
  ActionSample s;
  s.action.resize(u.size());
  s.log_prob = log_prob_pre;
  for (std::size_t j = 0; j < u.size(); ++j) {
    double t = std::tanh(u[j]);
    // tanh rounds to +-1 for |u| >~ 19; keep the action strictly interior
    if (t >= 1.0) t = std::nextafter(1.0, 0.0);
    if (t <= -1.0) t = std::nextafter(-1.0, 0.0);
    s.action[j] = t;
    s.log_prob -= std::log(1.0 - t * t + kSquashEps);
  }
  return s;
}

double gauss_entropy(const PolicyOutput& out) {
  double h = 0.0;
  for (double ls : out.log_std) h += 0.5 * (1.0 + kLogTwoPi) + ls;
  return h;
}

}  // namespace erc
