#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace rmcf {

/// Writes a header line and numeric rows with 15 significant digits.
class CsvWriter {
 public:
  CsvWriter(std::ostream& out, std::vector<std::string> columns);
  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);

 private:
  std::ostream& out_;
  std::size_t width_;
};

std::string format_number(double v);

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws FormatError when absent.
  std::size_t column(const std::string& name) const;
};

CsvTable read_csv(std::istream& in);

}  // namespace rmcf
