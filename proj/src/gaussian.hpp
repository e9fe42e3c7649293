#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "rng.hpp"

namespace erc {

// log-std clamp keeping densities (and the ratios built from them) sane.
inline constexpr double kLogStdMin = -5.0;
inline constexpr double kLogStdMax = 2.0;
inline constexpr double kSquashEps = 1e-6;

struct PolicyOutput {
  std::vector<double> mean;
  std::vector<double> log_std;  // already clamped
};

struct ActionSample {
  std::vector<double> action;
  double log_prob = 0.0;
};

// Splits one network output row [mean | log_std_raw] and clamps.
PolicyOutput policy_head_split(const double* row, int act_dim);

// 1 inside the clamp, 0 where the raw head output was clipped.
inline double log_std_gate(double raw) {
  return (raw > kLogStdMin && raw < kLogStdMax) ? 1.0 : 0.0;
}

double gauss_log_prob(const PolicyOutput& out, std::span<const double> a);

ActionSample gauss_sample(const PolicyOutput& out, Rng& rng);

// a = mean + exp(log_std) * z with z supplied by the caller, so the
// gradient path runs through mean and log_std only.
std::vector<double> gauss_rsample(const PolicyOutput& out,
                                  std::span<const double> z);

// a = tanh(u); corrected log density of the squashed variable.
ActionSample tanh_squash(std::span<const double> u, double log_prob_pre);

double gauss_entropy(const PolicyOutput& out);

}  // namespace erc
