#include "rmcf/csv.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include "rmcf/error.hpp"

namespace rmcf {

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> columns) : out_(out), width_(columns.size()) {
  for (std::size_t i = 0; i < columns.size(); ++i) out_ << (i ? "," : "") << columns[i];
  out_ << '\n';
}

void CsvWriter::row(std::initializer_list<double> values) { row(std::vector<double>(values)); }

void CsvWriter::row(const std::vector<double>& values) {
  if (values.size() != width_) throw InvalidArgument("csv row width does not match header");
  std::string line;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) line += ',';
    line += format_number(values[i]);
  }
  out_ << line << '\n';
}

std::size_t CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < columns.size(); ++i)
    if (columns[i] == name) return i;
  throw FormatError("csv: missing column '" + name + "'");
}

CsvTable read_csv(std::istream& in) {
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw FormatError("csv: empty input");
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) table.columns.push_back(cell);
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::vector<double> row;
    while (std::getline(ls, cell, ',')) {
      try {
        std::size_t used = 0;
        row.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw FormatError("csv: non-numeric cell '" + cell + "' at line " + std::to_string(lineno));
      }
    }
    if (row.size() != table.columns.size())
      throw FormatError("csv: wrong number of cells at line " + std::to_string(lineno));
    table.rows.push_back(std::move(row));
  }
  return table;
}

}  // namespace rmcf
