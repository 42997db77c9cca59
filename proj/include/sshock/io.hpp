#pragma once

#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace sshock {

/// Comma-separated output with a header row, LF endings and %.17g numbers.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);

  void row(std::initializer_list<double> values);
  void row(const std::vector<double>& values);
  /// Row with a leading text cell.
  void row(const std::string& label, const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::string path_;
};

std::string format_double(double v);

}  // namespace sshock
