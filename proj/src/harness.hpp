#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "config.hpp"
#include "trainer.hpp"

namespace erc {

struct RunResult {
  TrainSummary summary;
  std::string error;  // empty on success
};

// Runs each config to completion on a bounded pool. Runs share nothing;
// per-run determinism is independent of scheduling.
std::vector<RunResult> run_many(const std::vector<TrainerConfig>& cfgs,
                                int jobs);

struct GridRow {
  double eta_c = 0;
  double eta_m = 0;
  std::uint64_t seed = 0;
  double final_eval = 0;  // nan for failed or diverged-without-eval runs
  bool failed = false;
};

// One train+evaluate per (eta_c, eta_m, seed); rows sorted by
// (eta_c, eta_m, seed). Writes <out_dir>/grid.csv, runs live under
// <out_dir>/grid/.
std::vector<GridRow> grid_search(const TrainerConfig& base,
                                 std::vector<double> eta_cs,
                                 std::vector<double> eta_ms,
                                 std::vector<std::uint64_t> seeds, int jobs);

struct AblationRow {
  std::string condition;  // vanilla | c | m | cm
  std::uint64_t seed = 0;
  double final_eval = 0;
  double omega_final20 = 0;  // mean over the final 20% of episodes
  double pm_final20 = 0;
  bool failed = false;
};

// Four-condition matrix {vanilla, c, m, cm} switching the tricks via
// eta = 0; "on" values come from the base config. Writes
// <out_dir>/ablation_summary.csv, runs live under <out_dir>/ablate/.
std::vector<AblationRow> ablation(const TrainerConfig& base,
                                  std::vector<std::uint64_t> seeds, int jobs);

// Mean of a runlog column over the final fraction of episode rows.
double column_tail_mean(const std::string& runlog_path,
                        const std::string& column, double tail_fraction);

}  // namespace erc
