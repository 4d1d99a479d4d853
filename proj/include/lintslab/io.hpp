#pragma once

#include <map>
#include <string>
#include <vector>

#include "lintslab/experiments.hpp"
#include "lintslab/theory.hpp"

namespace lintslab {

// One rectangular result table: header plus string cells, written as CSV with
// LF line endings; numeric cells are preformatted to 9 significant digits.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

// %.9g formatting used for every number that reaches disk.
std::string format_number(double v);

CsvTable table_from_boxplots(const std::string& key_column,
                             const std::map<double, BoxplotStats>& stats);
CsvTable table_from_series(const SeriesTable& table);
CsvTable table_from_reports(const std::vector<VerificationReport>& reports);

// Writes UTF-8, comma-separated, one header row, LF endings. Throws IoError.
void write_csv(const CsvTable& table, const std::string& path);

}  // namespace lintslab
