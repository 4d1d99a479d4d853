#include "lintslab/io.hpp"

#include <cstdio>
#include <fstream>

#include "lintslab/errors.hpp"

namespace lintslab {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return std::string(buf);
}

CsvTable table_from_boxplots(const std::string& key_column,
                             const std::map<double, BoxplotStats>& stats) {
  CsvTable t;
  t.header = {key_column, "n", "min", "q1", "median", "q3", "max", "mean"};
  for (const auto& [key, b] : stats)
    t.rows.push_back({format_number(key), std::to_string(b.n), format_number(b.min),
                      format_number(b.q1), format_number(b.median), format_number(b.q3),
                      format_number(b.max), format_number(b.mean)});
  return t;
}

CsvTable table_from_series(const SeriesTable& table) {
  CsvTable t;
  t.header = {"t", "policy", "thinness_mean", "inst_regret_mean",
              "cum_regret_mean", "inst_regret_se", "psi_exceed_frac"};
  for (const auto& r : table.rows)
    t.rows.push_back({std::to_string(r.t), policy_name(r.policy),
                      format_number(r.thinness_mean), format_number(r.inst_regret_mean),
                      format_number(r.cum_regret_mean), format_number(r.inst_regret_se),
                      format_number(r.psi_exceed_frac)});
  return t;
}

CsvTable table_from_reports(const std::vector<VerificationReport>& reports) {
  CsvTable t;
  t.header = {"name", "n", "estimate", "target", "stderr", "pass"};
  for (const auto& r : reports)
    t.rows.push_back({r.name, std::to_string(r.n), format_number(r.estimate),
                      format_number(r.target), format_number(r.stderr_),
                      r.pass ? "1" : "0"});
  return t;
}

namespace {

std::string csv_cell(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string quoted = "\"";
  for (char c : cell) {
    if (c == '"') quoted += '"';
    quoted += c;
  }
  quoted += '"';
  return quoted;
}

}  // namespace

void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path, std::ios::binary);  // binary keeps LF endings everywhere
  if (!out) throw IoError("write_csv: cannot open " + path);
  auto write_row = [&out](const std::vector<std::string>& row) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out << ',';
      out << csv_cell(row[i]);
    }
    out << '\n';
  };
  write_row(table.header);
  for (const auto& row : table.rows) write_row(row);
  out.flush();
  if (!out) throw IoError("write_csv: write failed for " + path);
}

}  // namespace lintslab
