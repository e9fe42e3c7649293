#pragma once

#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace erc {

// One per-episode metrics row. Missing cells (warmup episodes, disabled
// features, no evaluation this episode) stay empty in the CSV.
struct RunRow {
  long long env_step = 0;
  long episode = 0;
  double train_return = 0.0;
  std::optional<double> eval_return;
  std::optional<double> d_mean;
  std::optional<double> disc_mean;
  std::optional<double> omega_mean;
  std::optional<double> integral_term;
  std::optional<double> pm_mean;
  std::optional<double> keep_fraction;
  std::optional<double> loss_pi;
  std::optional<double> loss_v;
  std::optional<double> loss_disc;
  std::optional<double> policy_entropy;
  long long skipped_steps = 0;  // cumulative non-finite update skips
};

inline constexpr const char* kRunLogSchema = "# erc-runlog-v1";
inline constexpr const char* kRunLogHeader =
    "env_step,episode,train_return,eval_return,d_mean,D_mean,omega_mean,"
    "I_term,pM_mean,keep_fraction,loss_pi,loss_v,loss_D,policy_entropy,"
    "skipped_steps";

// Streams rows to disk, flushing each one so a halted run still leaves
// a parseable file.
class RunLogWriter {
 public:
  RunLogWriter(const std::string& path,
               const std::map<std::string, std::string>& metadata);
  void write(const RunRow& row);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream os_;
};

struct RunTable {
  std::map<std::string, std::string> metadata;
  std::vector<std::string> columns;
  // cells[r][c]; empty optional for blank cells
  std::vector<std::vector<std::optional<double>>> cells;

  int column_index(const std::string& name) const;  // -1 if absent
  // (env_step, value) pairs for a named column, skipping blanks
  std::vector<std::pair<double, double>> series(const std::string& col) const;
};

// Rejects files whose schema line is missing or has a different version.
RunTable read_runlog_csv(const std::string& path);

}  // namespace erc
