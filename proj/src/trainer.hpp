#pragma once

#include <functional>
#include <limits>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "agents.hpp"
#include "config.hpp"
#include "envs.hpp"
#include "replay.hpp"
#include "runlog.hpp"
#include "rng.hpp"

namespace erc {

struct TrainSummary {
  long long env_steps = 0;
  long episodes = 0;
  double final_eval_mean = std::numeric_limits<double>::quiet_NaN();
  double final_eval_std = std::numeric_limits<double>::quiet_NaN();
  long long skipped_steps = 0;
  long long all_masked_batches = 0;
  long long env_faults = 0;
  bool diverged = false;
  std::string runlog_path;
};

struct EvalResult {
  double mean = 0.0;
  double stddev = 0.0;
};

// Deterministic greedy evaluation: fixed per-episode seeds derived from
// `seed`, identical across repeated calls. The callback returns the
// normalized action for an observation.
using EvalPolicy =
    std::function<void(std::span<const double> obs, std::vector<double>& act)>;
EvalResult evaluate(Env& env, const EvalPolicy& policy,
                    std::span<const double> act_scale, int episodes,
                    std::uint64_t seed);

// Collect one episode with the stochastic policy, then replay half the
// buffer in minibatches; repeat until the step budget runs out. Fully
// deterministic in (config, seed).
class Trainer {
 public:
  explicit Trainer(TrainerConfig cfg);

  // One episode plus its episode-end updates and log row. Returns false
  // once the budget is exhausted (or the run diverged).
  bool run_episode();
  TrainSummary finalize();

  const TrainerConfig& config() const { return cfg_; }
  long long steps() const { return steps_; }
  long episodes() const { return episodes_; }
  const A2cAgent* a2c_agent() const { return a2c_ ? &*a2c_ : nullptr; }
  const SacAgent* sac_agent() const { return sac_ ? &*sac_ : nullptr; }

 private:
  void run_eval();
  void write_row(double ep_return, const UpdateMetrics& m, bool with_eval);

  TrainerConfig cfg_;
  std::unique_ptr<Env> env_;
  std::unique_ptr<Env> eval_env_;
  std::vector<double> act_scale_;
  ReplayBuffer buffer_;
  std::optional<A2cAgent> a2c_;
  std::optional<SacAgent> sac_;
  Rng env_seed_rng_, policy_rng_, buffer_rng_, mining_rng_, update_rng_;
  std::unique_ptr<RunLogWriter> log_;
  std::vector<double> obs_, obs_next_, env_action_;
  Batch batch_;
  long long steps_ = 0;
  long episodes_ = 0;
  long long skipped_total_ = 0;
  long long all_masked_total_ = 0;
  long long faults_ = 0;
  double last_eval_mean_ = std::numeric_limits<double>::quiet_NaN();
  double last_eval_std_ = std::numeric_limits<double>::quiet_NaN();
  bool have_eval_ = false;
  bool diverged_ = false;
  bool finished_ = false;
};

// Run a full training job; writes runlog.csv and config.txt (and the
// checkpoint when enabled) under cfg.out_dir.
TrainSummary train(const TrainerConfig& cfg);

}  // namespace erc
