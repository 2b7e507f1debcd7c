#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>

namespace orbitkit::csv {

// Matrix exchange format: one row per line, comma separated, plain decimals
// printed with 17 significant digits. Complex entries are written "re+imj"
// (e.g. "1.5-0.25j").

std::string format_scalar(double v);
std::string format_scalar(std::complex<double> v);

void write_matrix(std::ostream& os, const Eigen::MatrixXd& m);
void write_matrix(std::ostream& os, const Eigen::MatrixXcd& m);
void write_matrix_file(const std::string& path, const Eigen::MatrixXd& m);
void write_matrix_file(const std::string& path, const Eigen::MatrixXcd& m);

Eigen::MatrixXd read_matrix(std::istream& is);
Eigen::MatrixXcd read_complex_matrix(std::istream& is);
Eigen::MatrixXd read_matrix_file(const std::string& path);
Eigen::MatrixXcd read_complex_matrix_file(const std::string& path);

/// Parse one scalar token, real or "re+imj".
std::complex<double> parse_complex(const std::string& token);

}  // namespace orbitkit::csv
