#include "erc/erc.h"

#include <cstring>
#include <fstream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "config.hpp"
#include "envs.hpp"
#include "harness.hpp"
#include "logging.hpp"
#include "svgplot.hpp"
#include "trainer.hpp"

namespace {

thread_local std::string t_last_error;

erc_status fail(erc_status code, const std::string& msg) {
  t_last_error = msg;
  return code;
}

template <typename Fn>
erc_status guarded(Fn&& fn) {
  try {
    return fn();
  } catch (const std::invalid_argument& e) {
    return fail(ERC_INVALID, e.what());
  } catch (const std::runtime_error& e) {
    return fail(ERC_IO, e.what());
  } catch (const std::exception& e) {
    return fail(ERC_INTERNAL, e.what());
  }
}

erc_status copy_out(const std::string& s, char* buf, size_t cap) {
  if (!buf || cap == 0) return fail(ERC_INVALID, "null output buffer");
  const size_t n = s.size() < cap - 1 ? s.size() : cap - 1;
  std::memcpy(buf, s.data(), n);
  buf[n] = '\0';
  if (s.size() >= cap) return fail(ERC_INVALID, "output buffer too small");
  return ERC_OK;
}

}  // namespace

struct erc_config {
  erc::TrainerConfig cfg;
};

struct erc_env {
  std::unique_ptr<erc::Env> env;
  std::vector<double> obs;
};

extern "C" {

const char* erc_version(void) { return "0.1.0"; }

const char* erc_last_error(void) { return t_last_error.c_str(); }

void erc_set_log_fn(erc_log_fn fn, void* user) {
  erc::set_log_hook(fn, user);
}

erc_config* erc_config_new(void) { return new erc_config(); }

void erc_config_free(erc_config* cfg) { delete cfg; }

erc_status erc_config_load_file(erc_config* cfg, const char* path) {
  if (!cfg || !path) return fail(ERC_INVALID, "null argument");
  return guarded([&] {
    cfg->cfg = erc::parse_config_file(path);
    return ERC_OK;
  });
}

erc_status erc_config_set(erc_config* cfg, const char* key,
                          const char* value) {
  if (!cfg || !key || !value) return fail(ERC_INVALID, "null argument");
  return guarded([&] {
    erc::apply_config_kv(cfg->cfg, key, value);
    return ERC_OK;
  });
}

erc_status erc_config_get(const erc_config* cfg, const char* key, char* buf,
                          size_t cap) {
  if (!cfg || !key) return fail(ERC_INVALID, "null argument");
  return guarded([&] {
    const std::string text = erc::config_to_text(cfg->cfg);
    std::istringstream is(text);
    std::string line;
    const std::string want = std::string(key) + " = ";
    while (std::getline(is, line)) {
      if (line.rfind(want, 0) == 0)
        return copy_out(line.substr(want.size()), buf, cap);
    }
    return fail(ERC_INVALID, std::string("unknown config key: ") + key);
  });
}

erc_status erc_config_save_file(const erc_config* cfg, const char* path) {
  if (!cfg || !path) return fail(ERC_INVALID, "null argument");
  return guarded([&]() -> erc_status {
    std::ofstream os(path, std::ios::binary);
    if (!os) return fail(ERC_IO, std::string("cannot write ") + path);
    os << erc::config_to_text(cfg->cfg);
    return ERC_OK;
  });
}

erc_status erc_train(const erc_config* cfg, erc_train_summary* summary) {
  if (!cfg) return fail(ERC_INVALID, "null config");
  return guarded([&]() -> erc_status {
    const erc::TrainSummary s = erc::train(cfg->cfg);
    if (summary) {
      summary->env_steps = s.env_steps;
      summary->episodes = s.episodes;
      summary->final_eval_mean = s.final_eval_mean;
      summary->final_eval_std = s.final_eval_std;
      summary->skipped_steps = s.skipped_steps;
      summary->all_masked_batches = s.all_masked_batches;
      summary->env_faults = s.env_faults;
      summary->diverged = s.diverged ? 1 : 0;
    }
    if (s.diverged)
      return fail(ERC_DIVERGED, "run halted on non-finite parameters");
    return ERC_OK;
  });
}

erc_status erc_grid_search(const erc_config* base, const double* eta_c,
                           size_t n_eta_c, const double* eta_m, size_t n_eta_m,
                           const uint64_t* seeds, size_t n_seeds, int jobs) {
  if (!base || !eta_c || !eta_m || !seeds)
    return fail(ERC_INVALID, "null argument");
  return guarded([&] {
    erc::grid_search(base->cfg, {eta_c, eta_c + n_eta_c},
                     {eta_m, eta_m + n_eta_m}, {seeds, seeds + n_seeds}, jobs);
    return ERC_OK;
  });
}

erc_status erc_ablation(const erc_config* base, const uint64_t* seeds,
                        size_t n_seeds, int jobs) {
  if (!base || !seeds) return fail(ERC_INVALID, "null argument");
  return guarded([&] {
    erc::ablation(base->cfg, {seeds, seeds + n_seeds}, jobs);
    return ERC_OK;
  });
}

erc_status erc_plot(const char* const* csv_paths, size_t n_paths,
                    const char* column, const char* out_svg) {
  if (!csv_paths || !column || !out_svg)
    return fail(ERC_INVALID, "null argument");
  return guarded([&] {
    std::vector<std::string> paths(csv_paths, csv_paths + n_paths);
    erc::emit_plot(paths, column, out_svg);
    return ERC_OK;
  });
}

erc_status erc_env_names(char* buf, size_t cap) {
  return guarded([&] {
    std::string all;
    for (const auto& n : erc::env_names()) {
      if (!all.empty()) all += "\n";
      all += n;
    }
    return copy_out(all, buf, cap);
  });
}

erc_status erc_env_describe(const char* name, char* buf, size_t cap) {
  if (!name) return fail(ERC_INVALID, "null name");
  return guarded([&] {
    auto env = erc::make_env(name);
    return copy_out(env->describe(), buf, cap);
  });
}

erc_env* erc_env_new(const char* name) {
  if (!name) {
    fail(ERC_INVALID, "null name");
    return nullptr;
  }
  erc_env* out = nullptr;
  guarded([&] {
    out = new erc_env{erc::make_env(name), {}};
    return ERC_OK;
  });
  return out;
}

void erc_env_free(erc_env* env) { delete env; }

erc_status erc_env_dims(const erc_env* env, int* obs_dim, int* act_dim) {
  if (!env) return fail(ERC_INVALID, "null env");
  if (obs_dim) *obs_dim = env->env->spec().obs_dim;
  if (act_dim) *act_dim = env->env->spec().act_dim;
  return ERC_OK;
}

erc_status erc_env_reset(erc_env* env, uint64_t seed, double* obs) {
  if (!env || !obs) return fail(ERC_INVALID, "null argument");
  return guarded([&] {
    env->env->reset(seed, env->obs);
    std::memcpy(obs, env->obs.data(), env->obs.size() * sizeof(double));
    return ERC_OK;
  });
}

erc_status erc_env_step(erc_env* env, const double* action, size_t act_len,
                        double* obs, double* reward, int* terminal,
                        int* truncated) {
  if (!env || !action) return fail(ERC_INVALID, "null argument");
  return guarded([&]() -> erc_status {
    const erc::StepResult r =
        env->env->step({action, act_len}, env->obs);
    if (r.fault)
      return fail(ERC_DIVERGED, "environment state went non-finite");
    if (obs)
      std::memcpy(obs, env->obs.data(), env->obs.size() * sizeof(double));
    if (reward) *reward = r.reward;
    if (terminal) *terminal = r.terminal ? 1 : 0;
    if (truncated) *truncated = r.truncated ? 1 : 0;
    return ERC_OK;
  });
}

}  // extern "C"
