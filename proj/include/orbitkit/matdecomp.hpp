#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

namespace orbitkit::matdecomp {

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;

// Tolerances (relative to the scale of the input where a scale exists).
inline constexpr double kSymmetryTol = 1e-12;
inline constexpr double kPdTol = 1e-10;        // times ||m||
inline constexpr double kSingularTol = 1e-12;  // on sigma_min / sigma_max
inline constexpr double kCutLocusTol = 1e-9;

struct SpectralDecomp {
  Eigen::VectorXd eigenvalues;   // descending
  RealMatrix eigenvectors;       // orthogonal, columns match eigenvalues
};

struct SvdDecomp {
  RealMatrix u;                  // orthogonal, n x n
  Eigen::VectorXd sigma;         // descending, >= 0, length min(n,k)
  RealMatrix v;                  // orthogonal, k x k
};

struct PolarDecomp {
  RealMatrix orthogonal;         // g with g'g = I
  RealMatrix spd;                // symmetric PSD factor, m = g * spd
};

struct TakagiDecomp {
  ComplexMatrix unitary;         // g
  Eigen::VectorXd sigma;         // real, >= 0, descending; m = g diag(sigma) g^T
};

struct SkewCanonical {
  RealMatrix g;                  // orthogonal; det recorded below
  RealMatrix alpha;              // block diagonal, 2x2 blocks [[0,a],[-a,0]], a >= 0 descending
  Eigen::VectorXd block_values;  // the a_i, descending
  double det_g;                  // +1 whenever attainable; -1 iff input nonsingular with Pf < 0
};

/// Eigendecomposition of a symmetric matrix with eigenvalues sorted descending.
SpectralDecomp spectral(const RealMatrix& m);

/// Full SVD with both orthogonal factors square.
SvdDecomp svd(const RealMatrix& m);

/// Unique symmetric positive-definite square root.
RealMatrix sym_sqrt(const RealMatrix& m);

/// Polar decomposition m = g * p of an invertible square matrix.
PolarDecomp polar(const RealMatrix& m);

/// Frobenius-nearest element of SO(n); u diag(1,..,1,det(uv')) v'.
/// Requires sigma_{n-1} + sigma_n det(uv') > 0 (uniqueness of the minimizer).
RealMatrix project_special_orthogonal(const RealMatrix& m);

/// Takagi factorization m = g diag(sigma) g^T of a nonsingular complex
/// symmetric matrix, g unitary.
TakagiDecomp takagi(const ComplexMatrix& m);

/// Internal variant without the nonsingularity check (the isotropic
/// Grassmannian projection only needs the leading columns of g).
TakagiDecomp takagi_allow_singular(const ComplexMatrix& m);

/// Canonical form g' m g = alpha of a skew-symmetric matrix of even dimension.
SkewCanonical skew_canonical(const RealMatrix& m);

// Rodrigues exponential and its inverse on SO(3).
Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w);
Eigen::Vector3d so3_log(const Eigen::Matrix3d& r);
Eigen::Matrix3d so3_hat(const Eigen::Vector3d& w);

}  // namespace orbitkit::matdecomp
