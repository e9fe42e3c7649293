#include "harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <thread>

#include "logging.hpp"
#include "runlog.hpp"

namespace erc {

std::vector<RunResult> run_many(const std::vector<TrainerConfig>& cfgs,
                                int jobs) {
  std::vector<RunResult> results(cfgs.size());
  if (cfgs.empty()) return results;
  const int hw = static_cast<int>(std::thread::hardware_concurrency());
  const int workers = std::max(
      1, std::min({jobs < 1 ? (hw > 0 ? hw : 1) : jobs,
                   static_cast<int>(cfgs.size()), hw > 0 ? hw : 1}));

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= cfgs.size()) return;
      try {
        results[i].summary = train(cfgs[i]);
      } catch (const std::exception& e) {
        results[i].error = e.what();
        log_line(std::string("run failed: ") + e.what());
      }
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  return results;
}

namespace {

std::string run_dir_name(double ec, double em, std::uint64_t seed) {
  return "ec" + format_double(ec) + "_em" + format_double(em) + "_s" +
         std::to_string(seed);
}

double summary_eval(const RunResult& r) {
  if (!r.error.empty()) return std::numeric_limits<double>::quiet_NaN();
  return r.summary.final_eval_mean;
}

}  // namespace

std::vector<GridRow> grid_search(const TrainerConfig& base,
                                 std::vector<double> eta_cs,
                                 std::vector<double> eta_ms,
                                 std::vector<std::uint64_t> seeds, int jobs) {
  if (eta_cs.empty() || eta_ms.empty() || seeds.empty())
    throw std::invalid_argument("grid_search: empty grid");
  TrainerConfig root = base;
  validate_config(root);
  if (root.algo != Algo::a2c_erc && root.algo != Algo::ppo_erc)
    throw std::invalid_argument("grid_search: algo must be a2c-erc or ppo-erc");
  std::sort(eta_cs.begin(), eta_cs.end());
  std::sort(eta_ms.begin(), eta_ms.end());
  std::sort(seeds.begin(), seeds.end());

  std::vector<TrainerConfig> cfgs;
  std::vector<GridRow> rows;
  for (double ec : eta_cs)
    for (double em : eta_ms)
      for (std::uint64_t seed : seeds) {
        TrainerConfig cfg = root;
        cfg.eta_c = ec;
        cfg.eta_m = em;
        cfg.seed = seed;
        cfg.out_dir = root.out_dir + "/grid/" + run_dir_name(ec, em, seed);
        cfgs.push_back(cfg);
        rows.push_back({ec, em, seed, 0.0, false});
      }

  const auto results = run_many(cfgs, jobs);
  std::ofstream os(root.out_dir + "/grid.csv", std::ios::binary);
  if (!os) throw std::runtime_error("grid_search: cannot write grid.csv");
  os << "# erc-grid-v1\n";
  os << "eta_c,eta_m,seed,final_eval_return\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    rows[i].final_eval = summary_eval(results[i]);
    rows[i].failed = !results[i].error.empty();
    os << format_double(rows[i].eta_c) << ',' << format_double(rows[i].eta_m)
       << ',' << rows[i].seed << ',' << format_double(rows[i].final_eval)
       << '\n';
  }
  return rows;
}

double column_tail_mean(const std::string& runlog_path,
                        const std::string& column, double tail_fraction) {
  const RunTable t = read_runlog_csv(runlog_path);
  const int ci = t.column_index(column);
  const int ei = t.column_index("episode");
  if (ci < 0) throw std::invalid_argument("no such column: " + column);
  if (t.cells.empty()) return std::numeric_limits<double>::quiet_NaN();
  const double last_ep = *t.cells.back()[ei];
  const double cutoff = last_ep * (1.0 - tail_fraction);
  double sum = 0;
  int n = 0;
  for (const auto& row : t.cells) {
    if (*row[ei] <= cutoff || !row[ci]) continue;
    sum += *row[ci];
    ++n;
  }
  return n > 0 ? sum / n : std::numeric_limits<double>::quiet_NaN();
}

std::vector<AblationRow> ablation(const TrainerConfig& base,
                                  std::vector<std::uint64_t> seeds, int jobs) {
  if (seeds.empty()) throw std::invalid_argument("ablation: no seeds");
  TrainerConfig root = base;
  validate_config(root);
  if (root.algo != Algo::a2c_erc && root.algo != Algo::ppo_erc)
    throw std::invalid_argument("ablation: algo must be a2c-erc or ppo-erc");
  std::sort(seeds.begin(), seeds.end());

  struct Cond {
    const char* label;
    bool use_c, use_m;
  };
  const Cond conds[4] = {
      {"vanilla", false, false}, {"c", true, false},
      {"m", false, true},        {"cm", true, true}};

  std::vector<TrainerConfig> cfgs;
  std::vector<AblationRow> rows;
  for (const Cond& c : conds)
    for (std::uint64_t seed : seeds) {
      TrainerConfig cfg = root;
      cfg.eta_c = c.use_c ? root.eta_c : 0.0;
      cfg.eta_m = c.use_m ? root.eta_m : 0.0;
      cfg.disc_enabled = c.use_c || c.use_m;
      cfg.seed = seed;
      cfg.out_dir = root.out_dir + "/ablate/" + c.label + "_s" +
                    std::to_string(seed);
      cfgs.push_back(cfg);
      AblationRow row;
      row.condition = c.label;
      row.seed = seed;
      rows.push_back(row);
    }

  const auto results = run_many(cfgs, jobs);
  std::ofstream os(root.out_dir + "/ablation_summary.csv", std::ios::binary);
  if (!os) throw std::runtime_error("ablation: cannot write summary");
  os << "# erc-ablation-v1\n";
  os << "condition,seed,final_eval_return,omega_mean_final20,pm_mean_final20\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    auto& row = rows[i];
    row.failed = !results[i].error.empty();
    row.final_eval = summary_eval(results[i]);
    const std::string log = cfgs[i].out_dir + "/runlog.csv";
    row.omega_final20 = row.failed
                            ? std::numeric_limits<double>::quiet_NaN()
                            : column_tail_mean(log, "omega_mean", 0.2);
    row.pm_final20 = row.failed ? std::numeric_limits<double>::quiet_NaN()
                                : column_tail_mean(log, "pM_mean", 0.2);
    os << row.condition << ',' << row.seed << ','
       << format_double(row.final_eval) << ','
       << format_double(row.omega_final20) << ','
       << format_double(row.pm_final20) << '\n';
  }
  return rows;
}

}  // namespace erc
