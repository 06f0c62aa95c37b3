#include "exmass/io.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace exmass::io {

std::vector<std::vector<double>> read_numeric_csv(const std::string& text) {
  std::vector<std::vector<double>> rows;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::size_t pos = 0;
    while (pos <= line.size()) {
      std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) comma = line.size();
      const std::string field = line.substr(pos, comma - pos);
      try {
        std::size_t used = 0;
        const double value = std::stod(field, &used);
        while (used < field.size() && std::isspace(static_cast<unsigned char>(field[used])))
          ++used;
        if (used != field.size()) throw std::invalid_argument(field);
        row.push_back(value);
      } catch (const std::exception&) {
        throw std::runtime_error("malformed numeric field '" + field + "' on line " +
                                 std::to_string(lineno));
      }
      pos = comma + 1;
      if (comma == line.size()) break;
    }
    if (!rows.empty() && row.size() != rows.front().size())
      throw std::runtime_error("inconsistent column count on line " + std::to_string(lineno));
    rows.push_back(std::move(row));
  }
  return rows;
}

densities::Sample parse_sample_csv(const std::string& text) {
  const auto rows = read_numeric_csv(text);
  if (rows.empty()) throw std::runtime_error("sample file contains no rows");
  const std::size_t d = rows.front().size();
  if (d < 1 || d > 2)
    throw std::runtime_error("sample files must have 1 or 2 columns, got " +
                             std::to_string(d));
  densities::Sample sample;
  sample.dimension = static_cast<int>(d);
  sample.data.reserve(rows.size() * d);
  for (const auto& row : rows)
    sample.data.insert(sample.data.end(), row.begin(), row.end());
  return sample;
}

densities::Sample read_sample_file(const std::string& path) {
  return parse_sample_csv(read_file(path));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

std::string format_double(double value) {
  char buf[32];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    double parsed = 0.0;
    std::sscanf(buf, "%lf", &parsed);
    if (parsed == value) break;
  }
  return buf;
}

}  // namespace exmass::io
