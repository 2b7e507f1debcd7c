#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace orbitkit::regression {

inline constexpr double kFocTol = 1e-10;
inline constexpr int kMaxIter = 200;
inline constexpr double kAntipodeGuard = 1e-6;  // radians from pi

/// Paired design points theta_l and observations y_l on S^2.
struct RegressionDataset {
  std::vector<Eigen::Vector3d> design;
  std::vector<Eigen::Vector3d> observations;

  size_t k() const { return design.size(); }
  void validate() const;  // equal lengths >= 3, unit norms
};

enum class Method { Extrinsic, Intrinsic };

struct RegressionFit {
  Eigen::Matrix3d gamma;
  Method method = Method::Extrinsic;
  int iterations = 0;
  double residual_norm = 0.0;        // || skew(gamma' nu(gamma)) ||_F
  bool converged = false;
  std::vector<int> antipodal_pairs;  // indices with alpha_l within the guard of pi
};

/// Components of (nu - gamma tau) along the supplied tangent directions,
/// nu = sum y_l theta_l', tau = sum theta_l theta_l'. Zero within kFocTol iff
/// gamma satisfies the first-order condition for least squares over a Gamma
/// whose tangent space at gamma is spanned by the basis.
Eigen::VectorXd lsq_linear(const RegressionDataset& data, const Eigen::MatrixXd& gamma,
                           const std::vector<Eigen::MatrixXd>& tangent_basis);

RegressionFit fit_extrinsic_so3(const RegressionDataset& data);

RegressionFit fit_intrinsic_so3(const RegressionDataset& data,
                                std::optional<Eigen::Matrix3d> init = std::nullopt);

double sum_sq_intrinsic(const RegressionDataset& data, const Eigen::Matrix3d& gamma);
double sum_sq_extrinsic(const RegressionDataset& data, const Eigen::Matrix3d& gamma);

}  // namespace orbitkit::regression
