#pragma once

#include <string>
#include <vector>

#include "exmass/densities.hpp"

namespace exmass::io {

//! Parses headerless numeric CSV: one row per line, comma-separated, all rows
//! the same width. Throws std::runtime_error naming the offending line.
std::vector<std::vector<double>> read_numeric_csv(const std::string& text);

//! Sample file: d numeric columns, d inferred from the first row (d <= 2).
densities::Sample parse_sample_csv(const std::string& text);
densities::Sample read_sample_file(const std::string& path);

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& content);

//! Shortest decimal that round-trips a double.
std::string format_double(double value);

}  // namespace exmass::io
