#pragma once

#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "precmat/errors.hpp"
#include "precmat/symmetric_matrix.hpp"
#include "precmat/tolerances.hpp"

namespace precmat {

// Rectangular numeric table read from CSV.  Cells that are empty or "NA"
// (also "na", "NaN") come back with observed = false and value 0.
struct Table {
  Eigen::MatrixXd values;
  Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic> observed;
  std::vector<std::string> col_names;  // empty unless a header row was read

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
};

namespace detail {

inline std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

inline bool is_na_token(const std::string& t) {
  return t.empty() || t == "NA" || t == "na" || t == "NaN" || t == "nan";
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

// 1-based coordinates in messages: that is how people count spreadsheet cells.
inline double parse_cell(const std::string& tok, std::size_t row, std::size_t col,
                         const std::string& path) {
  try {
    std::size_t pos = 0;
    double v = std::stod(tok, &pos);
    if (pos != tok.size()) throw std::invalid_argument("trailing junk");
    return v;
  } catch (const std::exception&) {
    throw InputError(path + ": cannot parse '" + tok + "' at row " +
                     std::to_string(row + 1) + ", column " + std::to_string(col + 1));
  }
}

}  // namespace detail

inline Table read_table(const std::string& path, bool header = false) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path);

  Table t;
  std::vector<std::vector<std::string>> cells;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (detail::trim(line).empty()) continue;
    auto toks = detail::split_csv_line(line);
    if (first && header) {
      t.col_names = toks;
      first = false;
      continue;
    }
    first = false;
    cells.push_back(std::move(toks));
  }
  if (cells.empty()) throw InputError(path + ": no data rows");

  const std::size_t ncol = cells[0].size();
  t.values.resize(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(ncol));
  t.observed.resize(static_cast<Eigen::Index>(cells.size()), static_cast<Eigen::Index>(ncol));
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (cells[i].size() != ncol)
      throw InputError(path + ": row " + std::to_string(i + 1 + (header ? 1 : 0)) + " has " +
                       std::to_string(cells[i].size()) + " cells, expected " +
                       std::to_string(ncol));
    for (std::size_t j = 0; j < ncol; ++j) {
      if (detail::is_na_token(cells[i][j])) {
        t.values(i, j) = 0.0;
        t.observed(i, j) = false;
      } else {
        t.values(i, j) = detail::parse_cell(cells[i][j], i, j, path);
        t.observed(i, j) = true;
      }
    }
  }
  return t;
}

// Square symmetric matrix from CSV.  NA cells are not allowed; asymmetry
// beyond `tol` is an error, smaller asymmetry is folded away by the
// SymmetricMatrix constructor.
inline SymmetricMatrix read_symmetric_csv(const std::string& path, bool header = false,
                                          double tol = default_tolerances().symmetry) {
  Table t = read_table(path, header);
  if (!t.observed.all()) throw InputError(path + ": matrix has missing cells");
  if (t.rows() != t.cols())
    throw InputError(path + ": expected a square matrix, got " + std::to_string(t.rows()) +
                     "x" + std::to_string(t.cols()));
  double asym = (t.values - t.values.transpose()).cwiseAbs().maxCoeff();
  if (asym > tol)
    throw InputError(path + ": matrix is not symmetric (max |S - S^T| = " +
                     std::to_string(asym) + ")");
  return SymmetricMatrix(t.values);
}

inline void write_matrix_csv(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
      out << buf;
      if (j + 1 < m.cols()) out << ',';
    }
    out << '\n';
  }
}

// Data matrix with missing cells written as NA.
inline void write_table_csv(const std::string& path, const Eigen::MatrixXd& values,
                            const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& observed) {
  if (values.rows() != observed.rows() || values.cols() != observed.cols())
    throw InputError("write_table_csv: value/mask shape mismatch");
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  char buf[32];
  for (Eigen::Index i = 0; i < values.rows(); ++i) {
    for (Eigen::Index j = 0; j < values.cols(); ++j) {
      if (observed(i, j)) {
        std::snprintf(buf, sizeof buf, "%.17g", values(i, j));
        out << buf;
      } else {
        out << "NA";
      }
      if (j + 1 < values.cols()) out << ',';
    }
    out << '\n';
  }
}

inline void write_mask_csv(const std::string& path,
                           const Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>& observed) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  for (Eigen::Index i = 0; i < observed.rows(); ++i) {
    for (Eigen::Index j = 0; j < observed.cols(); ++j) {
      out << (observed(i, j) ? '1' : '0');
      if (j + 1 < observed.cols()) out << ',';
    }
    out << '\n';
  }
}

}  // namespace precmat
