#include "agents.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace erc {

namespace {

constexpr char kCkptMagic[8] = {'E', 'R', 'C', 'C', 'K', 'P', 'T', '1'};
constexpr std::uint32_t kCkptVersion = 1;

void put_u32(std::ostream& os, std::uint32_t v) {
  unsigned char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 4);
}
void put_u64(std::ostream& os, std::uint64_t v) {
  unsigned char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
  os.write(reinterpret_cast<const char*>(b), 8);
}
void put_f64(std::ostream& os, double d) {
  put_u64(os, std::bit_cast<std::uint64_t>(d));
}
std::uint32_t get_u32(std::istream& is) {
  unsigned char b[4];
  is.read(reinterpret_cast<char*>(b), 4);
  std::uint32_t v = 0;
  for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(b[i]) << (8 * i);
  return v;
}
std::uint64_t get_u64(std::istream& is) {
  unsigned char b[8];
  is.read(reinterpret_cast<char*>(b), 8);
  std::uint64_t v = 0;
  for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(b[i]) << (8 * i);
  return v;
}
double get_f64(std::istream& is) { return std::bit_cast<double>(get_u64(is)); }

void put_vec(std::ostream& os, const std::vector<double>& v) {
  put_u64(os, v.size());
  for (double x : v) put_f64(os, x);
}
void get_vec(std::istream& is, std::vector<double>& v) {
  v.resize(get_u64(is));
  for (auto& x : v) x = get_f64(is);
}
void put_adam(std::ostream& os, const AdamState& a) {
  put_vec(os, a.m);
  put_vec(os, a.v);
  put_u64(os, static_cast<std::uint64_t>(a.t));
  put_f64(os, a.lr);
}
void get_adam(std::istream& is, AdamState& a) {
  get_vec(is, a.m);
  get_vec(is, a.v);
  a.t = static_cast<long long>(get_u64(is));
  a.lr = get_f64(is);
}

void write_ckpt_head(std::ostream& os, std::uint64_t cfg_hash,
                     std::uint32_t algo_tag) {
  os.write(kCkptMagic, 8);
  put_u32(os, kCkptVersion);
  put_u32(os, algo_tag);
  put_u64(os, cfg_hash);
}
void read_ckpt_head(std::istream& is, std::uint64_t expected_hash,
                    std::uint32_t expected_tag) {
  char magic[8];
  is.read(magic, 8);
  if (!is || std::memcmp(magic, kCkptMagic, 8) != 0)
    throw std::runtime_error("checkpoint: bad magic");
  if (get_u32(is) != kCkptVersion)
    throw std::runtime_error("checkpoint: unsupported version");
  if (get_u32(is) != expected_tag)
    throw std::runtime_error("checkpoint: algorithm mismatch");
  const std::uint64_t h = get_u64(is);
  if (expected_hash != 0 && h != expected_hash)
    throw std::runtime_error("checkpoint: config hash mismatch");
}

MlpSpec policy_spec(int obs_dim, int act_dim) {
  MlpSpec s;
  s.input_dim = obs_dim;
  s.output_dim = 2 * act_dim;
  return s;
}
MlpSpec scalar_spec(int in_dim, OutputActivation oa) {
  MlpSpec s;
  s.input_dim = in_dim;
  s.output_dim = 1;
  s.output_activation = oa;
  return s;
}

}  // namespace

void UpdateMetrics::accumulate(const UpdateMetrics& one) {
  const double w_old = updates, w_new = one.updates;
  const double w = w_old + w_new;
  if (w <= 0) return;
  auto mix = [&](double& acc, double v) {
    acc = (acc * w_old + v * w_new) / w;
  };
  mix(d_mean, one.d_mean);
  mix(disc_mean, one.disc_mean);
  mix(omega_mean, one.omega_mean);
  mix(pm_mean, one.pm_mean);
  mix(keep_fraction, one.keep_fraction);
  mix(loss_pi, one.loss_pi);
  mix(loss_v, one.loss_v);
  mix(loss_disc, one.loss_disc);
  mix(entropy, one.entropy);
  integral_term = one.integral_term;  // latest controller state
  has_tricks = has_tricks || one.has_tricks;
  has_disc = has_disc || one.has_disc;
  has_value = has_value || one.has_value;
  skipped += one.skipped;
  all_masked += one.all_masked;
  disc_above_half += one.disc_above_half;
  updates += one.updates;
}

// --- A2cAgent -----------------------------------------------------------

A2cAgent::A2cAgent(const TrainerConfig& cfg, const EnvSpec& env)
    : cfg_(cfg),
      act_dim_(env.act_dim),
      ppo_(cfg.algo == Algo::ppo_erc),
      pi_mlp_(policy_spec(env.obs_dim, env.act_dim)),
      v_mlp_(scalar_spec(env.obs_dim, OutputActivation::linear)),
      d_mlp_(scalar_spec(env.obs_dim, OutputActivation::sigmoid)) {
  pi_ = pi_mlp_.init(mix_seed(cfg.seed, static_cast<std::uint64_t>(
                                            RngStream::init_policy)));
  v_ = v_mlp_.init(
      mix_seed(cfg.seed, static_cast<std::uint64_t>(RngStream::init_value)));
  d_ = d_mlp_.init(
      mix_seed(cfg.seed, static_cast<std::uint64_t>(RngStream::init_disc)));
  pi_target_ = pi_;
  vbar_ = v_;
  pi_adam_ = adam_init(pi_mlp_.param_count(), cfg.lr);
  v_adam_ = adam_init(v_mlp_.param_count(), cfg.lr);
  d_adam_ = adam_init(d_mlp_.param_count(), cfg.lr);
  gain_.eta_c = cfg.eta_c;
  pi_grads_.resize(pi_mlp_.param_count());
  v_grads_.resize(v_mlp_.param_count());
  d_grads_.resize(d_mlp_.param_count());
  row_.resize(1, env.obs_dim);
}

ActionSample A2cAgent::act(std::span<const double> obs, Rng& rng) {
  std::memcpy(row_.row(0), obs.data(), obs.size() * sizeof(double));
  const Matrix& head = pi_mlp_.forward(pi_, row_, act_cache_);
  const PolicyOutput out = policy_head_split(head.row(0), act_dim_);
  return gauss_sample(out, rng);
}

std::vector<double> A2cAgent::mean_action(std::span<const double> obs) {
  std::memcpy(row_.row(0), obs.data(), obs.size() * sizeof(double));
  const Matrix& head = pi_mlp_.forward(pi_, row_, act_cache_);
  return {head.row(0), head.row(0) + act_dim_};
}

UpdateMetrics A2cAgent::update(const Batch& batch, Rng& mining_rng) {
  const std::size_t n = batch.size();
  UpdateMetrics m;
  m.updates = 1;

  // (1) policy likelihoods of the stored actions, with gradient path
  policy_eval(pi_mlp_, act_dim_, pi_, batch.s, batch.a, ev_);

  // (2) density ratios and one discriminator step on the full batch
  const bool tricks = cfg_.disc_enabled;
  if (tricks) {
    d_hat_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      d_hat_[i] = density_ratio(ev_.log_pi[i], batch.log_b[i]);
    d_grads_.assign(d_grads_.size(), 0.0);
    m.loss_disc = disc_loss_batch(d_mlp_, d_, batch.s, d_hat_, &d_grads_);
    if (!adam_step(d_adam_, d_.values, d_grads_)) ++m.skipped;
    disc_forward(d_mlp_, d_, batch.s, disc_vals_);
    double dsum = 0, Dsum = 0;
    for (std::size_t i = 0; i < n; ++i) {
      dsum += d_hat_[i];
      Dsum += disc_vals_[i];
      if (disc_vals_[i] > 0.5) ++m.disc_above_half;
    }
    m.d_mean = dsum / n;
    m.disc_mean = Dsum / n;
    m.has_tricks = true;
    m.has_disc = true;
  }

  // (3) mining masks
  mask_.assign(n, 1);
  double keep = static_cast<double>(n), pm_sum = 0;
  if (tricks && cfg_.eta_m > 0) {
    keep = 0;
    for (std::size_t i = 0; i < n; ++i) {
      const double p = mining_prob(d_hat_[i], disc_vals_[i], cfg_.eta_m);
      pm_sum += p;
      mask_[i] = mining_mask(p, mining_rng) ? 1 : 0;
      keep += mask_[i];
    }
  }
  m.pm_mean = pm_sum / n;
  m.keep_fraction = keep / n;
  if (keep == 0) ++m.all_masked;

  // (4) counteraction gain via the PI controller
  const bool counter = tricks && cfg_.eta_c > 0;
  if (counter) {
    pi_gain_update(gain_, d_hat_, omega_);
    double osum = 0;
    for (double w : omega_) osum += w;
    m.omega_mean = osum / n;
  } else {
    omega_.clear();
  }
  m.integral_term = gain_.integral;

  // (5) masked value and policy objectives plus the full-batch
  //     counteraction, one Adam step each
  const std::span<const std::uint8_t> value_mask =
      cfg_.mask_value_loss ? std::span<const std::uint8_t>(mask_)
                           : std::span<const std::uint8_t>();
  v_grads_.assign(v_grads_.size(), 0.0);
  const ValueLossResult vres = a2c_value_loss_batch(
      v_mlp_, v_, vbar_, batch, cfg_.gamma, value_mask, &v_grads_, &deltas_);
  if (vres.used > 0) {
    m.loss_v = vres.loss;
    m.has_value = true;
    if (!adam_step(v_adam_, v_.values, v_grads_)) ++m.skipped;
  }

  pi_grads_.assign(pi_grads_.size(), 0.0);
  const PolicyLossResult pres = a2c_policy_loss_batch(
      pi_mlp_, act_dim_, pi_, batch, ev_, deltas_, mask_, omega_,
      counter ? std::span<const double>(disc_vals_) : std::span<const double>(),
      ppo_, 0.2, &pi_grads_);
  m.loss_pi = pres.total;
  m.entropy = pres.entropy;
  if (!adam_step(pi_adam_, pi_.values, pi_grads_)) ++m.skipped;

  // (6) target updates (the policy target is diagnostic-only)
  soft_update(vbar_, v_, cfg_.tau);
  soft_update(pi_target_, pi_, cfg_.tau);
  return m;
}

bool A2cAgent::params_finite() const {
  return all_finite(pi_.values.data(), pi_.values.size()) &&
         all_finite(v_.values.data(), v_.values.size()) &&
         (!cfg_.disc_enabled || all_finite(d_.values.data(), d_.values.size()));
}

void A2cAgent::save_checkpoint(std::ostream& os, std::uint64_t cfg_hash) const {
  write_ckpt_head(os, cfg_hash, 1);
  save_parameter_blob(os, pi_mlp_.spec(), pi_);
  save_parameter_blob(os, pi_mlp_.spec(), pi_target_);
  save_parameter_blob(os, v_mlp_.spec(), v_);
  save_parameter_blob(os, v_mlp_.spec(), vbar_);
  save_parameter_blob(os, d_mlp_.spec(), d_);
  put_adam(os, pi_adam_);
  put_adam(os, v_adam_);
  put_adam(os, d_adam_);
  put_f64(os, gain_.integral);
  put_f64(os, gain_.eta_c);
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

void A2cAgent::load_checkpoint(std::istream& is, std::uint64_t expected_hash) {
  read_ckpt_head(is, expected_hash, 1);
  pi_ = load_parameter_blob(is).second;
  pi_target_ = load_parameter_blob(is).second;
  v_ = load_parameter_blob(is).second;
  vbar_ = load_parameter_blob(is).second;
  d_ = load_parameter_blob(is).second;
  get_adam(is, pi_adam_);
  get_adam(is, v_adam_);
  get_adam(is, d_adam_);
  gain_.integral = get_f64(is);
  gain_.eta_c = get_f64(is);
  if (!is) throw std::runtime_error("checkpoint: truncated");
}

// --- SacAgent -----------------------------------------------------------

SacAgent::SacAgent(const TrainerConfig& cfg, const EnvSpec& env)
    : cfg_(cfg),
      act_dim_(env.act_dim),
      pi_mlp_(policy_spec(env.obs_dim, env.act_dim)),
      q_mlp_(scalar_spec(env.obs_dim + env.act_dim, OutputActivation::linear)),
      alpha_(cfg.alpha),
      log_alpha_(std::log(std::max(cfg.alpha, 1e-8))) {
  pi_ = pi_mlp_.init(mix_seed(cfg.seed, static_cast<std::uint64_t>(
                                            RngStream::init_policy)));
  q1_ = q_mlp_.init(
      mix_seed(cfg.seed, static_cast<std::uint64_t>(RngStream::init_value)));
  q2_ = q_mlp_.init(
      mix_seed(cfg.seed, static_cast<std::uint64_t>(RngStream::init_value2)));
  qbar1_ = q1_;
  qbar2_ = q2_;
  pi_adam_ = adam_init(pi_mlp_.param_count(), cfg.lr);
  q1_adam_ = adam_init(q_mlp_.param_count(), cfg.lr);
  q2_adam_ = adam_init(q_mlp_.param_count(), cfg.lr);
  pi_grads_.resize(pi_mlp_.param_count());
  q1_grads_.resize(q_mlp_.param_count());
  q2_grads_.resize(q_mlp_.param_count());
  row_.resize(1, env.obs_dim);
}

ActionSample SacAgent::act(std::span<const double> obs, Rng& rng) {
  std::memcpy(row_.row(0), obs.data(), obs.size() * sizeof(double));
  const Matrix& head = pi_mlp_.forward(pi_, row_, act_cache_);
  const PolicyOutput out = policy_head_split(head.row(0), act_dim_);
  std::vector<double> z(act_dim_);
  for (auto& v : z) v = rng.normal();
  const std::vector<double> u = gauss_rsample(out, z);
  double lp = 0.0;
  for (int j = 0; j < act_dim_; ++j)
    lp += -0.5 * 1.8378770664093454836 - out.log_std[j] - 0.5 * z[j] * z[j];
  return tanh_squash(u, lp);
}

std::vector<double> SacAgent::mean_action(std::span<const double> obs) {
  std::memcpy(row_.row(0), obs.data(), obs.size() * sizeof(double));
  const Matrix& head = pi_mlp_.forward(pi_, row_, act_cache_);
  std::vector<double> a(act_dim_);
  for (int j = 0; j < act_dim_; ++j) a[j] = std::tanh(head.row(0)[j]);
  return a;
}

UpdateMetrics SacAgent::update(const Batch& batch, Rng& update_rng) {
  const std::size_t n = batch.size();
  UpdateMetrics m;
  m.updates = 1;

  z_next_.resize(n, act_dim_);
  z_.resize(n, act_dim_);
  for (auto& v : z_next_.data) v = update_rng.normal();
  for (auto& v : z_.data) v = update_rng.normal();

  q1_grads_.assign(q1_grads_.size(), 0.0);
  q2_grads_.assign(q2_grads_.size(), 0.0);
  const SacCriticResult cres = sac_critic_loss_batch(
      pi_mlp_, act_dim_, pi_, q_mlp_, q1_, q2_, qbar1_, qbar2_, batch,
      z_next_, alpha_, cfg_.gamma, &q1_grads_, &q2_grads_);
  m.loss_v = cres.loss;
  m.has_value = true;
  if (!adam_step(q1_adam_, q1_.values, q1_grads_)) ++m.skipped;
  if (!adam_step(q2_adam_, q2_.values, q2_grads_)) ++m.skipped;

  pi_grads_.assign(pi_grads_.size(), 0.0);
  const SacActorResult ares = sac_actor_loss_batch(
      pi_mlp_, act_dim_, pi_, q_mlp_, q1_, q2_, batch.s, z_, alpha_,
      &pi_grads_);
  m.loss_pi = ares.loss;
  m.entropy = -ares.mean_log_pi;
  if (!adam_step(pi_adam_, pi_.values, pi_grads_)) ++m.skipped;

  if (cfg_.alpha_auto) {
    const double target_entropy = -static_cast<double>(act_dim_);
    log_alpha_ += cfg_.lr * (ares.mean_log_pi + target_entropy);
    alpha_ = std::exp(log_alpha_);
  }

  soft_update(qbar1_, q1_, cfg_.tau);
  soft_update(qbar2_, q2_, cfg_.tau);
  m.keep_fraction = 1.0;
  return m;
}

bool SacAgent::params_finite() const {
  return all_finite(pi_.values.data(), pi_.values.size()) &&
         all_finite(q1_.values.data(), q1_.values.size()) &&
         all_finite(q2_.values.data(), q2_.values.size()) &&
         std::isfinite(alpha_);
}

void SacAgent::save_checkpoint(std::ostream& os, std::uint64_t cfg_hash) const {
  write_ckpt_head(os, cfg_hash, 2);
  save_parameter_blob(os, pi_mlp_.spec(), pi_);
  save_parameter_blob(os, q_mlp_.spec(), q1_);
  save_parameter_blob(os, q_mlp_.spec(), q2_);
  save_parameter_blob(os, q_mlp_.spec(), qbar1_);
  save_parameter_blob(os, q_mlp_.spec(), qbar2_);
  put_adam(os, pi_adam_);
  put_adam(os, q1_adam_);
  put_adam(os, q2_adam_);
  put_f64(os, alpha_);
  put_f64(os, log_alpha_);
  if (!os) throw std::runtime_error("checkpoint: write failed");
}

void SacAgent::load_checkpoint(std::istream& is, std::uint64_t expected_hash) {
  read_ckpt_head(is, expected_hash, 2);
  pi_ = load_parameter_blob(is).second;
  q1_ = load_parameter_blob(is).second;
  q2_ = load_parameter_blob(is).second;
  qbar1_ = load_parameter_blob(is).second;
  qbar2_ = load_parameter_blob(is).second;
  get_adam(is, pi_adam_);
  get_adam(is, q1_adam_);
  get_adam(is, q2_adam_);
  alpha_ = get_f64(is);
  log_alpha_ = get_f64(is);
  if (!is) throw std::runtime_error("checkpoint: truncated");
}

}  // namespace erc
