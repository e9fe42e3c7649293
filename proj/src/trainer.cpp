#include "trainer.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "logging.hpp"

namespace erc {

namespace {
constexpr std::uint64_t kEvalTag = 0x4556414cULL;  // mixes eval episode seeds
}

EvalResult evaluate(Env& env, const EvalPolicy& policy,
                    std::span<const double> act_scale, int episodes,
                    std::uint64_t seed) {
  if (episodes < 1)
    throw std::invalid_argument("evaluate: episodes must be >= 1");
  std::vector<double> obs, action, env_action(act_scale.size());
  std::vector<double> returns;
  returns.reserve(episodes);
  for (int e = 0; e < episodes; ++e) {
    env.reset(mix_seed(seed, kEvalTag, static_cast<std::uint64_t>(e)), obs);
    double ret = 0.0;
    for (;;) {
      policy(obs, action);
      for (std::size_t j = 0; j < env_action.size(); ++j)
        env_action[j] = action[j] * act_scale[j];
      const StepResult r = env.step(env_action, obs);
      if (r.fault) break;
      ret += r.reward;
      if (r.terminal || r.truncated) break;
    }
    returns.push_back(ret);
  }
  EvalResult res;
  for (double r : returns) res.mean += r;
  res.mean /= returns.size();
  for (double r : returns) res.stddev += (r - res.mean) * (r - res.mean);
  res.stddev = std::sqrt(res.stddev / returns.size());
  return res;
}

namespace {
TrainerConfig validated(TrainerConfig cfg) {
  validate_config(cfg);
  return cfg;
}
}  // namespace

Trainer::Trainer(TrainerConfig cfg)
    : cfg_(validated(std::move(cfg))),
      env_(make_env(cfg_.env)),
      eval_env_(make_env(cfg_.env)),
      buffer_(cfg_.buffer, env_->spec().obs_dim, env_->spec().act_dim),
      env_seed_rng_(cfg_.seed, RngStream::env),
      policy_rng_(cfg_.seed, RngStream::policy),
      buffer_rng_(cfg_.seed, RngStream::buffer),
      mining_rng_(cfg_.seed, RngStream::mining),
      update_rng_(cfg_.seed, RngStream::update) {
  const EnvSpec& spec = env_->spec();
  act_scale_.resize(spec.act_dim);
  for (int j = 0; j < spec.act_dim; ++j) {
    if (spec.act_low[j] != -spec.act_high[j])
      throw std::invalid_argument("trainer: asymmetric action bounds");
    act_scale_[j] = spec.act_high[j];
  }
  if (cfg_.algo == Algo::sac)
    sac_.emplace(cfg_, spec);
  else
    a2c_.emplace(cfg_, spec);

  std::filesystem::create_directories(cfg_.out_dir);
  {
    std::ofstream os(cfg_.out_dir + "/config.txt", std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + cfg_.out_dir +
                                      "/config.txt");
    os << config_to_text(cfg_);
  }
  std::map<std::string, std::string> meta{
      {"algo", algo_name(cfg_.algo)},
      {"env", cfg_.env},
      {"eta_c", format_double(cfg_.eta_c)},
      {"eta_m", format_double(cfg_.eta_m)},
      {"seed", std::to_string(cfg_.seed)},
  };
  log_ = std::make_unique<RunLogWriter>(cfg_.out_dir + "/runlog.csv", meta);
  env_action_.resize(spec.act_dim);
}

void Trainer::run_eval() {
  EvalPolicy policy;
  if (a2c_) {
    policy = [this](std::span<const double> obs, std::vector<double>& act) {
      act = a2c_->mean_action(obs);
    };
  } else {
    policy = [this](std::span<const double> obs, std::vector<double>& act) {
      act = sac_->mean_action(obs);
    };
  }
  const EvalResult r = evaluate(*eval_env_, policy, act_scale_,
                                cfg_.eval_episodes, cfg_.seed);
  last_eval_mean_ = r.mean;
  last_eval_std_ = r.stddev;
  have_eval_ = true;

  std::ostringstream os;
  os << algo_name(cfg_.algo) << " " << cfg_.env << " seed=" << cfg_.seed
     << " episode=" << episodes_ << " step=" << steps_
     << " eval=" << format_double(r.mean);
  log_line(os.str());
}

void Trainer::write_row(double ep_return, const UpdateMetrics& m,
                        bool with_eval) {
  RunRow row;
  row.env_step = steps_;
  row.episode = episodes_;
  row.train_return = ep_return;
  if (with_eval) row.eval_return = last_eval_mean_;
  row.skipped_steps = skipped_total_;
  if (m.updates > 0) {
    row.loss_pi = m.loss_pi;
    if (m.has_value) row.loss_v = m.loss_v;
    row.policy_entropy = m.entropy;
    if (m.has_disc) {
      row.d_mean = m.d_mean;
      row.disc_mean = m.disc_mean;
      row.loss_disc = m.loss_disc;
    } else if (a2c_) {
      row.d_mean = 0.5;  // the clamp value: the ratio path is disabled
    }
    if (a2c_) {
      row.omega_mean = m.omega_mean;
      row.integral_term = m.integral_term;
      row.pm_mean = m.pm_mean;
      row.keep_fraction = m.keep_fraction;
    } else {
      row.keep_fraction = 1.0;
    }
  }
  log_->write(row);
}

bool Trainer::run_episode() {
  if (finished_ || diverged_ || steps_ >= cfg_.total_env_steps) return false;

  env_->reset(env_seed_rng_.next_u64(), obs_);
  double ep_return = 0.0;
  bool ended = false;
  while (!ended && steps_ < cfg_.total_env_steps) {
    const ActionSample sample = a2c_ ? a2c_->act(obs_, policy_rng_)
                                     : sac_->act(obs_, policy_rng_);
    if (!all_finite(sample.action.data(), sample.action.size()) ||
        !std::isfinite(sample.log_prob)) {
      diverged_ = true;
      break;
    }
    for (std::size_t j = 0; j < env_action_.size(); ++j)
      env_action_[j] = sample.action[j] * act_scale_[j];
    const StepResult r = env_->step(env_action_, obs_next_);
    ++steps_;
    if (r.fault) {
      ++faults_;
      log_line("env fault: non-finite state, episode aborted");
      break;
    }
    ep_return += r.reward;
    buffer_.push(obs_, sample.action, obs_next_, r.reward, r.terminal,
                 sample.log_prob);
    std::swap(obs_, obs_next_);
    ended = r.terminal || r.truncated;
  }
  ++episodes_;

  UpdateMetrics agg;
  const std::size_t n_updates =
      diverged_ ? 0
                : replay_schedule(buffer_.size(),
                                  static_cast<std::size_t>(cfg_.batch));
  for (std::size_t u = 0; u < n_updates; ++u) {
    buffer_.sample_uniform(static_cast<std::size_t>(cfg_.batch), buffer_rng_,
                           batch_);
    if (a2c_)
      agg.accumulate(a2c_->update(batch_, mining_rng_));
    else
      agg.accumulate(sac_->update(batch_, update_rng_));
  }
  skipped_total_ += agg.skipped;
  all_masked_total_ += agg.all_masked;

  diverged_ =
      diverged_ || (a2c_ ? !a2c_->params_finite() : !sac_->params_finite());
  const bool final = diverged_ || steps_ >= cfg_.total_env_steps;
  const bool do_eval =
      !diverged_ && (episodes_ % cfg_.eval_every == 0 || final);
  if (do_eval) run_eval();
  write_row(ep_return, agg, do_eval);
  if (diverged_) log_line("run diverged: non-finite parameters, halting");
  return !final;
}

TrainSummary Trainer::finalize() {
  finished_ = true;
  TrainSummary s;
  s.env_steps = steps_;
  s.episodes = episodes_;
  if (have_eval_) {
    s.final_eval_mean = last_eval_mean_;
    s.final_eval_std = last_eval_std_;
  }
  s.skipped_steps = skipped_total_;
  s.all_masked_batches = all_masked_total_;
  s.env_faults = faults_;
  s.diverged = diverged_;
  s.runlog_path = cfg_.out_dir + "/runlog.csv";
  if (cfg_.save_checkpoint && !diverged_) {
    std::ofstream os(cfg_.out_dir + "/checkpoint.bin", std::ios::binary);
    if (!os)
      throw std::runtime_error("cannot write checkpoint in " + cfg_.out_dir);
    if (a2c_)
      a2c_->save_checkpoint(os, config_hash(cfg_));
    else
      sac_->save_checkpoint(os, config_hash(cfg_));
  }
  return s;
}

TrainSummary train(const TrainerConfig& cfg) {
  Trainer t(cfg);
  while (t.run_episode()) {
  }
  return t.finalize();
}

}  // namespace erc
