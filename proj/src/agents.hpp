#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "config.hpp"
#include "envs.hpp"
#include "gaussian.hpp"
#include "losses.hpp"
#include "mlp.hpp"
#include "optim.hpp"
#include "replay.hpp"
#include "tricks.hpp"

namespace erc {

// Aggregated over the minibatches of one episode-end training burst.
struct UpdateMetrics {
  int updates = 0;
  double d_mean = 0, disc_mean = 0, omega_mean = 0, integral_term = 0;
  double pm_mean = 0, keep_fraction = 0;
  double loss_pi = 0, loss_v = 0, loss_disc = 0, entropy = 0;
  bool has_tricks = false;  // density-ratio path active
  bool has_disc = false;
  bool has_value = false;
  long long skipped = 0;           // non-finite gradient skips
  long long all_masked = 0;        // batches where every mask was zero
  long long disc_above_half = 0;   // D(s) > 0.5 occurrences (diagnostic)

  void accumulate(const UpdateMetrics& one);
};

// A2C (optionally with the counteraction/mining tricks) and the
// PPO-clip variant; policy and value are separate networks, both with
// soft-updated targets. The policy target is maintained for parity and
// diagnostics only; no loss consumes it.
class A2cAgent {
 public:
  A2cAgent(const TrainerConfig& cfg, const EnvSpec& env);

  ActionSample act(std::span<const double> obs, Rng& rng);
  std::vector<double> mean_action(std::span<const double> obs);
  UpdateMetrics update(const Batch& batch, Rng& mining_rng);
  bool params_finite() const;

  void save_checkpoint(std::ostream& os, std::uint64_t cfg_hash) const;
  void load_checkpoint(std::istream& is, std::uint64_t expected_hash);

  const ParameterSet& policy_params() const { return pi_; }
  const ParameterSet& value_params() const { return v_; }
  const ParameterSet& value_target_params() const { return vbar_; }
  const ParameterSet& policy_target_params() const { return pi_target_; }
  const PiGainState& gain_state() const { return gain_; }

 private:
  TrainerConfig cfg_;
  int act_dim_;
  bool ppo_;
  Mlp pi_mlp_, v_mlp_, d_mlp_;
  ParameterSet pi_, pi_target_, v_, vbar_, d_;
  AdamState pi_adam_, v_adam_, d_adam_;
  PiGainState gain_;
  // scratch reused across updates
  PolicyBatchEval ev_;
  std::vector<double> pi_grads_, v_grads_, d_grads_;
  std::vector<double> d_hat_, disc_vals_, omega_, deltas_;
  std::vector<std::uint8_t> mask_;
  Matrix row_;
  MlpCache act_cache_;
};

// Soft actor-critic with twin critics and tanh-squashed Gaussian policy.
class SacAgent {
 public:
  SacAgent(const TrainerConfig& cfg, const EnvSpec& env);

  ActionSample act(std::span<const double> obs, Rng& rng);
  std::vector<double> mean_action(std::span<const double> obs);
  UpdateMetrics update(const Batch& batch, Rng& update_rng);
  bool params_finite() const;
  double alpha() const { return alpha_; }

  void save_checkpoint(std::ostream& os, std::uint64_t cfg_hash) const;
  void load_checkpoint(std::istream& is, std::uint64_t expected_hash);

  const ParameterSet& policy_params() const { return pi_; }

 private:
  TrainerConfig cfg_;
  int act_dim_;
  Mlp pi_mlp_, q_mlp_;
  ParameterSet pi_, q1_, q2_, qbar1_, qbar2_;
  AdamState pi_adam_, q1_adam_, q2_adam_;
  double alpha_;
  double log_alpha_;
  std::vector<double> pi_grads_, q1_grads_, q2_grads_;
  Matrix z_, z_next_;
  Matrix row_;
  MlpCache act_cache_;
};

}  // namespace erc
