#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "slev/design_set.hpp"
#include "slev/errors.hpp"

namespace slev {

// Fixed 17-significant-digit formatting; round-trips doubles exactly and
// keeps outputs byte-identical across runs.
inline std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Dataset CSV layout: header row with columns x0..x{d-1}, then any of the
// optional columns y, f_star, density, in that order.
inline void write_design_csv(const std::string& path, const DesignSet& X) {
  X.validate();
  std::ofstream out(path);
  if (!out) throw ConfigError("cannot open '" + path + "' for writing");
  const int d = X.dim();
  for (int j = 0; j < d; ++j) out << (j ? ",x" : "x") << j;
  if (X.has_responses()) out << ",y";
  if (X.has_true_values()) out << ",f_star";
  if (X.has_densities()) out << ",density";
  out << "\n";
  for (Eigen::Index i = 0; i < X.size(); ++i) {
    for (int j = 0; j < d; ++j) {
      if (j) out << ',';
      out << fmt17(X.points(i, j));
    }
    if (X.has_responses()) out << ',' << fmt17(X.responses(i));
    if (X.has_true_values()) out << ',' << fmt17(X.true_values(i));
    if (X.has_densities()) out << ',' << fmt17(X.densities(i));
    out << "\n";
  }
  if (!out) throw ConfigError("failed while writing '" + path + "'");
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::stringstream ss(line);
  std::string field;
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

inline double parse_double(const std::string& s, const std::string& path, std::size_t line_no) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("'" + path + "' line " + std::to_string(line_no) +
                      ": cannot parse number '" + s + "'");
  }
}

}  // namespace detail

inline DesignSet read_design_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open '" + path + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("'" + path + "' is empty");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const auto header = detail::split_csv_line(line);

  int d = 0;
  while (d < static_cast<int>(header.size()) && header[d] == "x" + std::to_string(d)) ++d;
  if (d == 0) throw ConfigError("'" + path + "': header must start with column x0");
  int col_y = -1, col_fstar = -1, col_density = -1;
  for (std::size_t j = static_cast<std::size_t>(d); j < header.size(); ++j) {
    if (header[j] == "y")
      col_y = static_cast<int>(j);
    else if (header[j] == "f_star")
      col_fstar = static_cast<int>(j);
    else if (header[j] == "density")
      col_density = static_cast<int>(j);
    else
      throw ConfigError("'" + path + "': unknown column '" + header[j] + "'");
  }

  std::vector<std::vector<double>> rows;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw ConfigError("'" + path + "' line " + std::to_string(line_no) +
                        ": expected " + std::to_string(header.size()) + " fields");
    std::vector<double> row(fields.size());
    for (std::size_t j = 0; j < fields.size(); ++j)
      row[j] = detail::parse_double(fields[j], path, line_no);
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("'" + path + "' contains no data rows");

  DesignSet X;
  const auto n = static_cast<Eigen::Index>(rows.size());
  X.points.resize(n, d);
  if (col_y >= 0) X.responses.resize(n);
  if (col_fstar >= 0) X.true_values.resize(n);
  if (col_density >= 0) X.densities.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = rows[static_cast<std::size_t>(i)];
    for (int j = 0; j < d; ++j) X.points(i, j) = row[static_cast<std::size_t>(j)];
    if (col_y >= 0) X.responses(i) = row[static_cast<std::size_t>(col_y)];
    if (col_fstar >= 0) X.true_values(i) = row[static_cast<std::size_t>(col_fstar)];
    if (col_density >= 0) X.densities(i) = row[static_cast<std::size_t>(col_density)];
  }
  X.validate();
  return X;
}

}  // namespace slev
