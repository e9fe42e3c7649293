// erc command-line harness. Everything goes through the C API in
// erc/erc.h; this translation unit never touches the core directly.

#include <cinttypes>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "erc/erc.h"

namespace {

void log_to_stderr(const char* line, void*) {
  std::fprintf(stderr, "%s\n", line);
}

int exit_code(erc_status st) {
  if (st == ERC_OK) return 0;
  if (st == ERC_DIVERGED) return 1;
  return 2;
}

int fail_with(erc_status st, const char* what) {
  std::fprintf(stderr, "erc: %s: %s\n", what, erc_last_error());
  return exit_code(st);
}

struct ConfigHandle {
  erc_config* cfg = erc_config_new();
  ~ConfigHandle() { erc_config_free(cfg); }
};

std::vector<double> parse_doubles(const std::string& csv) {
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? csv.size() - start
                                                     : comma - start);
    if (!tok.empty()) out.push_back(std::stod(tok));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

std::vector<uint64_t> parse_seeds(const std::string& csv) {
  std::vector<uint64_t> out;
  std::size_t start = 0;
  while (start <= csv.size()) {
    const auto comma = csv.find(',', start);
    const std::string tok =
        csv.substr(start, comma == std::string::npos ? csv.size() - start
                                                     : comma - start);
    if (!tok.empty()) out.push_back(std::strtoull(tok.c_str(), nullptr, 10));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return out;
}

// Applies --config then the individual flag overrides, in that order.
struct CommonOpts {
  std::string config_file, algo, env, out;
  std::string eta_c, eta_m, seed, steps;
  std::vector<std::string> sets;

  void attach(CLI::App* app, bool with_trick_flags) {
    app->add_option("--config", config_file, "config file (key = value)");
    app->add_option("--algo", algo, "a2c-erc | a2c | sac | ppo-erc");
    app->add_option("--env", env, "pendulum | double-pendulum | reacher2d");
    if (with_trick_flags) {
      app->add_option("--eta-c", eta_c, "counteraction gain");
      app->add_option("--eta-m", eta_m, "mining exponent");
    }
    app->add_option("--seed", seed, "root RNG seed");
    app->add_option("--steps", steps, "total environment steps");
    app->add_option("--out", out, "output directory");
    app->add_option("--set", sets, "extra overrides, key=value")->take_all();
  }

  erc_status apply(erc_config* cfg) const {
    erc_status st = ERC_OK;
    auto set = [&](const char* key, const std::string& value) {
      if (st == ERC_OK && !value.empty())
        st = erc_config_set(cfg, key, value.c_str());
    };
    if (!config_file.empty()) {
      st = erc_config_load_file(cfg, config_file.c_str());
      if (st != ERC_OK) return st;
    }
    set("algo", algo);
    set("env", env);
    set("eta_c", eta_c);
    set("eta_m", eta_m);
    set("seed", seed);
    set("total_env_steps", steps);
    set("out_dir", out);
    for (const auto& kv : sets) {
      if (st != ERC_OK) break;
      const auto eq = kv.find('=');
      if (eq == std::string::npos) {
        std::fprintf(stderr, "erc: --set expects key=value, got '%s'\n",
                     kv.c_str());
        return ERC_INVALID;
      }
      st = erc_config_set(cfg, kv.substr(0, eq).c_str(),
                          kv.substr(eq + 1).c_str());
    }
    return st;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"erc: on-policy actor-critic with stabilized experience replay"};
  app.require_subcommand(1);
  erc_set_log_fn(log_to_stderr, nullptr);

  CommonOpts train_opts, grid_opts, ablate_opts;
  std::string grid_eta_c = "0.1,0.5,1,5,10", grid_eta_m = "0.1,0.5,1,5,10";
  std::string grid_seeds = "1", ablate_seeds = "1,2,3";
  int jobs = 0;
  std::string plot_column, plot_out;
  std::vector<std::string> plot_csvs;
  std::string describe_id;

  auto* train_cmd = app.add_subcommand("train", "run one training job");
  train_opts.attach(train_cmd, true);

  auto* grid_cmd =
      app.add_subcommand("grid", "grid-search (eta_c, eta_m) across seeds");
  grid_opts.attach(grid_cmd, false);
  grid_cmd->add_option("--eta-c", grid_eta_c, "comma list of eta_c values");
  grid_cmd->add_option("--eta-m", grid_eta_m, "comma list of eta_m values");
  grid_cmd->add_option("--seeds", grid_seeds, "comma list of seeds");
  grid_cmd->add_option("--jobs", jobs, "worker threads (default: all cores)");

  auto* ablate_cmd =
      app.add_subcommand("ablate", "run the {vanilla, c, m, cm} trick matrix");
  ablate_opts.attach(ablate_cmd, true);
  ablate_cmd->add_option("--seeds", ablate_seeds, "comma list of seeds");
  ablate_cmd->add_option("--jobs", jobs, "worker threads (default: all cores)");

  auto* plot_cmd = app.add_subcommand("plot", "render a runlog column as SVG");
  plot_cmd->add_option("--column", plot_column, "runlog column name")
      ->required();
  plot_cmd->add_option("--out", plot_out, "output SVG path")->required();
  plot_cmd->add_option("csv", plot_csvs, "input runlog CSVs")->required();

  auto* envs_cmd = app.add_subcommand("envs", "environment info");
  auto* describe_cmd =
      envs_cmd->add_subcommand("describe", "print spec and physics constants");
  describe_cmd->add_option("id", describe_id, "environment id")->required();
  auto* list_cmd = envs_cmd->add_subcommand("list", "list environment ids");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (train_cmd->parsed()) {
    ConfigHandle h;
    erc_status st = train_opts.apply(h.cfg);
    if (st != ERC_OK) return fail_with(st, "config");
    erc_train_summary s{};
    st = erc_train(h.cfg, &s);
    if (st != ERC_OK && st != ERC_DIVERGED) return fail_with(st, "train");
    std::printf("episodes=%ld env_steps=%lld final_eval=%g (+-%g) "
                "skipped=%lld diverged=%d\n",
                s.episodes, s.env_steps, s.final_eval_mean, s.final_eval_std,
                s.skipped_steps, s.diverged);
    if (st == ERC_DIVERGED) std::fprintf(stderr, "erc: %s\n", erc_last_error());
    return exit_code(st);
  }

  if (grid_cmd->parsed()) {
    ConfigHandle h;
    erc_status st = grid_opts.apply(h.cfg);
    if (st != ERC_OK) return fail_with(st, "config");
    const auto ecs = parse_doubles(grid_eta_c);
    const auto ems = parse_doubles(grid_eta_m);
    const auto seeds = parse_seeds(grid_seeds);
    st = erc_grid_search(h.cfg, ecs.data(), ecs.size(), ems.data(), ems.size(),
                         seeds.data(), seeds.size(), jobs);
    if (st != ERC_OK) return fail_with(st, "grid");
    std::printf("grid complete: %zu conditions x %zu seeds\n",
                ecs.size() * ems.size(), seeds.size());
    return 0;
  }

  if (ablate_cmd->parsed()) {
    ConfigHandle h;
    erc_status st = ablate_opts.apply(h.cfg);
    if (st != ERC_OK) return fail_with(st, "config");
    const auto seeds = parse_seeds(ablate_seeds);
    st = erc_ablation(h.cfg, seeds.data(), seeds.size(), jobs);
    if (st != ERC_OK) return fail_with(st, "ablate");
    std::printf("ablation complete: 4 conditions x %zu seeds\n", seeds.size());
    return 0;
  }

  if (plot_cmd->parsed()) {
    std::vector<const char*> paths;
    paths.reserve(plot_csvs.size());
    for (const auto& p : plot_csvs) paths.push_back(p.c_str());
    const erc_status st = erc_plot(paths.data(), paths.size(),
                                   plot_column.c_str(), plot_out.c_str());
    if (st != ERC_OK) return fail_with(st, "plot");
    std::printf("wrote %s\n", plot_out.c_str());
    return 0;
  }

  if (envs_cmd->parsed()) {
    char buf[4096];
    if (describe_cmd->parsed()) {
      const erc_status st =
          erc_env_describe(describe_id.c_str(), buf, sizeof(buf));
      if (st != ERC_OK) return fail_with(st, "envs describe");
      std::fputs(buf, stdout);
      return 0;
    }
    if (list_cmd->parsed()) {
      const erc_status st = erc_env_names(buf, sizeof(buf));
      if (st != ERC_OK) return fail_with(st, "envs list");
      std::printf("%s\n", buf);
      return 0;
    }
    std::fprintf(stderr, "erc: envs needs a subcommand (describe | list)\n");
    return 2;
  }
  return 2;
}
