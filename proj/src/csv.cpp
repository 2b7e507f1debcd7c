#include "orbitkit/csv.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

#include "orbitkit/errors.hpp"

namespace orbitkit::csv {

std::string format_scalar(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_scalar(std::complex<double> v) {
  char buf[96];
  std::snprintf(buf, sizeof(buf), "%.17g%+.17gj", v.real(), v.imag());
  return buf;
}

namespace {

template <typename M>
void write_any(std::ostream& os, const M& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ',';
      os << format_scalar(m(i, j));
    }
    os << '\n';
  }
}

std::vector<std::vector<std::string>> read_cells(std::istream& is) {
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(is, line)) {
    if (line.empty() || line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    rows.push_back(std::move(cells));
  }
  if (rows.empty()) fail(ErrorCode::IoError, "empty CSV matrix");
  const size_t ncol = rows.front().size();
  for (const auto& r : rows)
    if (r.size() != ncol) fail(ErrorCode::IoError, "ragged CSV matrix");
  return rows;
}

}  // namespace

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m) { write_any(os, m); }
void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m) { write_any(os, m); }

void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::IoError, "cannot open for writing: " + path);
  write_matrix(f, m);
}

void write_matrix_file(const std::string& path, const Eigen::MatrixXcd& m) {
  std::ofstream f(path);
  if (!f) fail(ErrorCode::IoError, "cannot open for writing: " + path);
  write_matrix(f, m);
}

std::complex<double> parse_complex(const std::string& token) {
  std::string s;
  for (char c : token)
    if (!std::isspace(static_cast<unsigned char>(c))) s.push_back(c);
  if (s.empty()) fail(ErrorCode::IoError, "empty CSV cell");
  if (s.back() == 'j' || s.back() == 'J') {
    s.pop_back();
    // split at the last +/- that is not a leading sign and not part of an exponent
    size_t split = std::string::npos;
    for (size_t i = s.size(); i-- > 1;) {
      if ((s[i] == '+' || s[i] == '-') && s[i - 1] != 'e' && s[i - 1] != 'E') {
        split = i;
        break;
      }
    }
    if (split == std::string::npos) return {0.0, std::stod(s.empty() ? "1" : s)};
    double re = std::stod(s.substr(0, split));
    double im = std::stod(s.substr(split));
    return {re, im};
  }
  return {std::stod(s), 0.0};
}

Eigen::MatrixXd read_matrix(std::istream& is) {
  auto rows = read_cells(is);
  Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j) {
      auto z = parse_complex(rows[i][j]);
      if (z.imag() != 0.0) fail(ErrorCode::IoError, "complex entry in real matrix");
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = z.real();
    }
  if (!m.allFinite()) fail(ErrorCode::IoError, "non-finite entry in CSV matrix");
  return m;
}

Eigen::MatrixXcd read_complex_matrix(std::istream& is) {
  auto rows = read_cells(is);
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (size_t i = 0; i < rows.size(); ++i)
    for (size_t j = 0; j < rows[i].size(); ++j)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = parse_complex(rows[i][j]);
  if (!m.allFinite()) fail(ErrorCode::IoError, "non-finite entry in CSV matrix");
  return m;
}

Eigen::MatrixXd read_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::IoError, "cannot open: " + path);
  return read_matrix(f);
}

Eigen::MatrixXcd read_complex_matrix_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) fail(ErrorCode::IoError, "cannot open: " + path);
  return read_complex_matrix(f);
}

}  // namespace orbitkit::csv
