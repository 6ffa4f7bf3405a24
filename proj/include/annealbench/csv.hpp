#pragma once

#include <initializer_list>
#include <iosfwd>
#include <string>
#include <vector>

namespace annealbench {

/// Shortest round-trip text for a double ("%.17g").
std::string fmt(double v);

std::vector<std::string> split_csv_line(const std::string& line);

/// Reads rows of numbers. Blank lines and lines starting with '#' are skipped.
/// If the first data line is exactly the listed header names it is skipped too.
/// Throws InvalidArgument on any non-numeric cell.
std::vector<std::vector<double>> read_numeric_rows(std::istream& in, std::initializer_list<const char*> header);

/// Writes `text` to `path`, creating parent directories. Throws std::runtime_error.
void write_file(const std::string& path, const std::string& text);

}  // namespace annealbench
