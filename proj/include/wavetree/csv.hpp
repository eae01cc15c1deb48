#pragma once

#include <array>
#include <charconv>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

#include "wavetree/coefficients.hpp"

namespace wavetree {

//! Shortest decimal string that parses back to exactly the same double.
inline std::string format_double(double value) {
  std::array<char, 32> buf{};
  auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

inline double parse_double(std::string_view text) {
  double value = 0.0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("csv: cannot parse number '" + std::string(text) +
                             "'");
  }
  return value;
}

inline std::int64_t parse_int(std::string_view text) {
  std::int64_t value = 0;
  auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw std::runtime_error("csv: cannot parse integer '" +
                             std::string(text) + "'");
  }
  return value;
}

inline std::vector<std::string_view> split_fields(std::string_view line,
                                                  char sep = ',') {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    std::size_t pos = line.find(sep, start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      break;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
  return out;
}

// Writes via a temp file in the same directory, then renames into place, so
// a partially written file is never observed under the final name.
inline void write_file_atomic(const std::filesystem::path& path,
                              std::string_view content) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) {
      throw std::runtime_error("cannot open for writing: " + tmp.string());
    }
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) {
      throw std::runtime_error("write failed: " + tmp.string());
    }
  }
  std::filesystem::rename(tmp, path);
}

inline std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw std::runtime_error("cannot open for reading: " + path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

//! CSV body for a coefficient field: header plus one row per slot,
//! levels ascending, positions ascending within a level.
inline std::string field_to_csv(const CoefficientField& field) {
  std::string out = "level,position,value\n";
  for (int j = -1; j < field.max_level(); ++j) {
    auto vals = field.level_values(j);
    for (std::size_t k = 0; k < vals.size(); ++k) {
      out += std::to_string(j);
      out += ',';
      out += std::to_string(k);
      out += ',';
      out += format_double(vals[k]);
      out += '\n';
    }
  }
  return out;
}

inline CoefficientField field_from_csv(std::string_view text) {
  struct Row {
    int level;
    std::int64_t position;
    double value;
  };
  std::vector<Row> rows;
  int max_level = 0;
  std::size_t lineno = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty()) continue;
    if (lineno == 1 && line.find("level") != std::string_view::npos) continue;
    auto fields = split_fields(line);
    if (fields.size() != 3) {
      throw std::runtime_error("csv: expected 3 columns at line " +
                               std::to_string(lineno));
    }
    Row r{static_cast<int>(parse_int(fields[0])), parse_int(fields[1]),
          parse_double(fields[2])};
    if (r.level < -1) {
      throw std::runtime_error("csv: level below -1 at line " +
                               std::to_string(lineno));
    }
    if (r.position < 0 || r.position >= CoefficientField::slots(r.level)) {
      throw std::runtime_error("csv: position out of range at line " +
                               std::to_string(lineno));
    }
    max_level = std::max(max_level, r.level + 1);
    rows.push_back(r);
  }
  CoefficientField field(max_level);
  for (const auto& r : rows) field.set(r.level, r.position, r.value);
  return field;
}

inline void write_field_csv(const std::filesystem::path& path,
                            const CoefficientField& field) {
  write_file_atomic(path, field_to_csv(field));
}

inline CoefficientField read_field_csv(const std::filesystem::path& path) {
  return field_from_csv(read_file(path));
}

//! Two-column numeric series, e.g. (lambda, value) or (J, value).
inline std::string series_to_csv(std::string_view x_name,
                                 std::string_view y_name,
                                 const std::vector<double>& x,
                                 const std::vector<double>& y) {
  if (x.size() != y.size()) {
    throw std::invalid_argument("series_to_csv: column length mismatch");
  }
  std::string out;
  out += x_name;
  out += ',';
  out += y_name;
  out += '\n';
  for (std::size_t i = 0; i < x.size(); ++i) {
    out += format_double(x[i]);
    out += ',';
    out += format_double(y[i]);
    out += '\n';
  }
  return out;
}

}  // namespace wavetree
