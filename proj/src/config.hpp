#pragma once

#include <cstdint>
#include <string>

namespace erc {

enum class Algo { a2c_erc, a2c, sac, ppo_erc };

const char* algo_name(Algo a);
Algo algo_from_name(const std::string& name);

struct TrainerConfig {
  Algo algo = Algo::a2c_erc;
  std::string env = "pendulum";
  double eta_c = 0.5;
  double eta_m = 2.0;
  std::uint64_t seed = 0;
  long long total_env_steps = 0;
  int eval_every = 20;  // episodes between evaluations
  int eval_episodes = 10;
  double gamma = 0.99;
  double tau = 0.1;
  double lr = 1e-3;
  std::uint64_t buffer = 102400;
  int batch = 256;
  double alpha = 0.2;  // SAC entropy weight
  bool alpha_auto = false;
  bool mask_value_loss = true;
  bool disc_enabled = true;
  bool save_checkpoint = false;
  std::string out_dir;  // empty: $ERC_OUT_DIR or "."
};

// Shortest round-trip decimal form; parse(format(x)) == x exactly.
std::string format_double(double v);
double parse_double(const std::string& s);

// One `key = value` per line, '#' comments. Unknown keys are rejected.
TrainerConfig parse_config_text(const std::string& text);
TrainerConfig parse_config_file(const std::string& path);
void apply_config_kv(TrainerConfig& cfg, const std::string& key,
                     const std::string& value);
std::string config_to_text(const TrainerConfig& cfg);

// Range checks plus normalization: a2c and sac force both tricks off
// and the discriminator disabled; a discriminator cannot be disabled
// while either trick is active. Resolves out_dir.
void validate_config(TrainerConfig& cfg);

// FNV-1a over the canonical text, used to stamp checkpoints.
std::uint64_t config_hash(const TrainerConfig& cfg);

}  // namespace erc
