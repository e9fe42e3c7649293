#include "config.hpp"

#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "envs.hpp"

namespace erc {

const char* algo_name(Algo a) {
  switch (a) {
    case Algo::a2c_erc: return "a2c-erc";
    case Algo::a2c: return "a2c";
    case Algo::sac: return "sac";
    case Algo::ppo_erc: return "ppo-erc";
  }
  return "?";
}

Algo algo_from_name(const std::string& name) {
  if (name == "a2c-erc") return Algo::a2c_erc;
  if (name == "a2c") return Algo::a2c;
  if (name == "sac") return Algo::sac;
  if (name == "ppo-erc") return Algo::ppo_erc;
  throw std::invalid_argument("unknown algo: " + name);
}

std::string format_double(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s) {
  double v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad number: '" + s + "'");
  return v;
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

long long parse_ll(const std::string& s) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad integer: '" + s + "'");
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw std::invalid_argument("bad unsigned integer: '" + s + "'");
  return v;
}

bool parse_bool(const std::string& s) {
  if (s == "true" || s == "1") return true;
  if (s == "false" || s == "0") return false;
  throw std::invalid_argument("bad bool: '" + s + "'");
}

}  // namespace

void apply_config_kv(TrainerConfig& cfg, const std::string& key,
                     const std::string& value) {
  if (key == "algo") cfg.algo = algo_from_name(value);
  else if (key == "env") cfg.env = value;
  else if (key == "eta_c") cfg.eta_c = parse_double(value);
  else if (key == "eta_m") cfg.eta_m = parse_double(value);
  else if (key == "seed") cfg.seed = parse_u64(value);
  else if (key == "total_env_steps") cfg.total_env_steps = parse_ll(value);
  else if (key == "eval_every") cfg.eval_every = static_cast<int>(parse_ll(value));
  else if (key == "eval_episodes") cfg.eval_episodes = static_cast<int>(parse_ll(value));
  else if (key == "gamma") cfg.gamma = parse_double(value);
  else if (key == "tau") cfg.tau = parse_double(value);
  else if (key == "lr") cfg.lr = parse_double(value);
  else if (key == "buffer") cfg.buffer = parse_u64(value);
  else if (key == "batch") cfg.batch = static_cast<int>(parse_ll(value));
  else if (key == "alpha") cfg.alpha = parse_double(value);
  else if (key == "alpha_auto") cfg.alpha_auto = parse_bool(value);
  else if (key == "mask_value_loss") cfg.mask_value_loss = parse_bool(value);
  else if (key == "disc_enabled") cfg.disc_enabled = parse_bool(value);
  else if (key == "save_checkpoint") cfg.save_checkpoint = parse_bool(value);
  else if (key == "out_dir") cfg.out_dir = value;
  else throw std::invalid_argument("unknown config key: '" + key + "'");
}

TrainerConfig parse_config_text(const std::string& text) {
  TrainerConfig cfg;
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("config line " + std::to_string(lineno) +
                                  ": expected key = value");
    apply_config_kv(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
  }
  return cfg;
}

TrainerConfig parse_config_file(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::invalid_argument("cannot open config file: " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return parse_config_text(ss.str());
}

std::string config_to_text(const TrainerConfig& c) {
  std::ostringstream os;
  os << "algo = " << algo_name(c.algo) << "\n";
  os << "env = " << c.env << "\n";
  os << "eta_c = " << format_double(c.eta_c) << "\n";
  os << "eta_m = " << format_double(c.eta_m) << "\n";
  os << "seed = " << c.seed << "\n";
  os << "total_env_steps = " << c.total_env_steps << "\n";
  os << "eval_every = " << c.eval_every << "\n";
  os << "eval_episodes = " << c.eval_episodes << "\n";
  os << "gamma = " << format_double(c.gamma) << "\n";
  os << "tau = " << format_double(c.tau) << "\n";
  os << "lr = " << format_double(c.lr) << "\n";
  os << "buffer = " << c.buffer << "\n";
  os << "batch = " << c.batch << "\n";
  os << "alpha = " << format_double(c.alpha) << "\n";
  os << "alpha_auto = " << (c.alpha_auto ? "true" : "false") << "\n";
  os << "mask_value_loss = " << (c.mask_value_loss ? "true" : "false") << "\n";
  os << "disc_enabled = " << (c.disc_enabled ? "true" : "false") << "\n";
  os << "save_checkpoint = " << (c.save_checkpoint ? "true" : "false") << "\n";
  os << "out_dir = " << c.out_dir << "\n";
  return os.str();
}

void validate_config(TrainerConfig& cfg) {
  env_id_from_name(cfg.env);  // throws for unknown envs
  if (cfg.eta_c < 0 || cfg.eta_m < 0)
    throw std::invalid_argument("eta_c and eta_m must be >= 0");
  if (cfg.gamma < 0 || cfg.gamma >= 1)
    throw std::invalid_argument("gamma must be in [0, 1)");
  if (cfg.tau < 0 || cfg.tau > 1)
    throw std::invalid_argument("tau must be in [0, 1]");
  if (cfg.lr <= 0) throw std::invalid_argument("lr must be positive");
  if (cfg.batch < 1) throw std::invalid_argument("batch must be >= 1");
  if (cfg.buffer < static_cast<std::uint64_t>(cfg.batch))
    throw std::invalid_argument("buffer must hold at least one batch");
  if (cfg.alpha < 0) throw std::invalid_argument("alpha must be >= 0");
  if (cfg.eval_every < 1 || cfg.eval_episodes < 1)
    throw std::invalid_argument("eval_every and eval_episodes must be >= 1");
  if (cfg.total_env_steps < 0)
    throw std::invalid_argument("total_env_steps must be >= 0");

  if (cfg.algo == Algo::a2c || cfg.algo == Algo::sac) {
    if (cfg.eta_c != 0 || cfg.eta_m != 0) {
      if (cfg.eta_c == 0.5 && cfg.eta_m == 2.0) {
        // untouched defaults: silently turn the tricks off
        cfg.eta_c = 0;
        cfg.eta_m = 0;
      } else {
        throw std::invalid_argument(
            "eta_c/eta_m only apply to a2c-erc and ppo-erc");
      }
    }
    cfg.disc_enabled = false;
  }
  if (!cfg.disc_enabled && (cfg.eta_c > 0 || cfg.eta_m > 0))
    throw std::invalid_argument(
        "the tricks need the discriminator: disc_enabled=false requires "
        "eta_c = eta_m = 0");

  if (cfg.out_dir.empty()) {
    const char* root = std::getenv("ERC_OUT_DIR");
    cfg.out_dir = (root && *root) ? root : ".";
  }
}

std::uint64_t config_hash(const TrainerConfig& cfg) {
  const std::string text = config_to_text(cfg);
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace erc
