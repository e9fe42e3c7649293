#include "runlog.hpp"

#include <sstream>
#include <stdexcept>

#include "config.hpp"

namespace erc {

RunLogWriter::RunLogWriter(const std::string& path,
                           const std::map<std::string, std::string>& metadata)
    : path_(path), os_(path, std::ios::binary) {
  if (!os_) throw std::runtime_error("runlog: cannot open " + path);
  os_ << kRunLogSchema << "\n# ";
  bool first = true;
  for (const auto& [k, v] : metadata) {
    if (!first) os_ << " ";
    os_ << k << "=" << v;
    first = false;
  }
  os_ << "\n" << kRunLogHeader << "\n";
  os_.flush();
}

namespace {
void put_cell(std::ostream& os, const std::optional<double>& v) {
  os << ',';
  if (v) os << format_double(*v);
}
}  // namespace

void RunLogWriter::write(const RunRow& r) {
  os_ << r.env_step << ',' << r.episode << ',' << format_double(r.train_return);
  put_cell(os_, r.eval_return);
  put_cell(os_, r.d_mean);
  put_cell(os_, r.disc_mean);
  put_cell(os_, r.omega_mean);
  put_cell(os_, r.integral_term);
  put_cell(os_, r.pm_mean);
  put_cell(os_, r.keep_fraction);
  put_cell(os_, r.loss_pi);
  put_cell(os_, r.loss_v);
  put_cell(os_, r.loss_disc);
  put_cell(os_, r.policy_entropy);
  os_ << ',' << r.skipped_steps << '\n';
  os_.flush();
}

int RunTable::column_index(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return static_cast<int>(i);
  return -1;
}

std::vector<std::pair<double, double>> RunTable::series(
    const std::string& col) const {
  const int ci = column_index(col);
  const int xi = column_index("env_step");
  if (ci < 0 || xi < 0) throw std::invalid_argument("no such column: " + col);
  std::vector<std::pair<double, double>> out;
  for (const auto& row : cells) {
    if (row[ci] && row[xi]) out.emplace_back(*row[xi], *row[ci]);
  }
  return out;
}

RunTable read_runlog_csv(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("runlog: cannot open " + path);
  std::string line;
  if (!std::getline(is, line))
    throw std::runtime_error("runlog: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kRunLogSchema)
    throw std::runtime_error("runlog: unknown schema '" + line + "' in " +
                             path);

  RunTable t;
  // optional metadata comment lines
  while (is.peek() == '#') {
    std::getline(is, line);
    std::istringstream ms(line.substr(1));
    std::string tok;
    while (ms >> tok) {
      const auto eq = tok.find('=');
      if (eq != std::string::npos)
        t.metadata[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  if (!std::getline(is, line))
    throw std::runtime_error("runlog: missing header in " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  {
    std::istringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) t.columns.push_back(col);
  }
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::optional<double>> row;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= line.size(); ++i) {
      if (i == line.size() || line[i] == ',') {
        const std::string cell = line.substr(start, i - start);
        if (cell.empty())
          row.emplace_back(std::nullopt);
        else
          row.emplace_back(parse_double(cell));
        start = i + 1;
      }
    }
    if (row.size() != t.columns.size())
      throw std::runtime_error("runlog: ragged row in " + path);
    t.cells.push_back(std::move(row));
  }
  return t;
}

}  // namespace erc
