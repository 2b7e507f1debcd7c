#include "orbitkit/regression.hpp"

#include <cmath>

#include "orbitkit/errors.hpp"
#include "orbitkit/matdecomp.hpp"
#include "orbitkit/sphere_geom.hpp"

namespace orbitkit::regression {

namespace md = orbitkit::matdecomp;
using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

namespace {
constexpr double kPi = 3.14159265358979323846;

double weight_of(double alpha) {
  if (alpha < 1e-6) return 1.0 + alpha * alpha / 6.0;
  return alpha / std::sin(alpha);
}

/// nu(gamma) = (1/k) sum (alpha_l / sin alpha_l) y_l theta_l',
/// cos alpha_l = <y_l, gamma theta_l>.
Matrix3d weighted_nu(const RegressionDataset& d, const Matrix3d& gamma,
                     double* alpha_max = nullptr) {
  Matrix3d nu = Matrix3d::Zero();
  double amax = 0.0;
  for (size_t l = 0; l < d.k(); ++l) {
    const double c = std::clamp(d.observations[l].dot(gamma * d.design[l]), -1.0, 1.0);
    const double a = std::acos(c);
    amax = std::max(amax, a);
    nu += weight_of(a) * d.observations[l] * d.design[l].transpose();
  }
  nu /= static_cast<double>(d.k());
  if (alpha_max) *alpha_max = amax;
  return nu;
}

double foc_residual(const Matrix3d& gamma, const Matrix3d& nu) {
  const Matrix3d t = gamma.transpose() * nu;
  return (0.5 * (t - t.transpose())).norm();
}

// so(3) basis for the Newton safeguard.
const Matrix3d kE1 = (Matrix3d() << 0, 0, 0, 0, 0, -1, 0, 1, 0).finished();
const Matrix3d kE2 = (Matrix3d() << 0, 0, 1, 0, 0, 0, -1, 0, 0).finished();
const Matrix3d kE3 = (Matrix3d() << 0, -1, 0, 1, 0, 0, 0, 0, 0).finished();

struct LocalModel {
  double f = 0.0;
  Vector3d grad = Vector3d::Zero();
  Matrix3d hess = Matrix3d::Zero();
  double residual = 0.0;  // |grad| / (2 sqrt 2) = ||skew(gamma' nu)||_F
  double alpha_max = 0.0;
};

/// Value, gradient and hessian of F(xi) = (1/k) sum dist(y_l, exp(xi) gamma theta_l)^2
/// at xi = 0, over the so(3) coordinates.
LocalModel local_model(const RegressionDataset& d, const Matrix3d& gamma) {
  LocalModel m;
  const Matrix3d* basis[3] = {&kE1, &kE2, &kE3};
  const double k = static_cast<double>(d.k());
  for (size_t l = 0; l < d.k(); ++l) {
    const Vector3d gt = gamma * d.design[l];
    const Vector3d& y = d.observations[l];
    const double c = std::clamp(y.dot(gt), -1.0, 1.0);
    const double a = std::acos(c);
    m.alpha_max = std::max(m.alpha_max, a);
    const double s2 = std::max(1.0 - c * c, 1e-300);
    const double s = std::sqrt(s2);
    const double w = weight_of(a);
    m.f += a * a / k;
    Vector3d dc;
    for (int i = 0; i < 3; ++i) dc(i) = y.dot((*basis[i]) * gt);
    m.grad += (-2.0 / k) * w * dc;
    // d(a^2)/dc = -2a/sin a ; d2(a^2)/dc2 = 2/sin^2 a - 2 a cos a / sin^3 a
    const double phi1 = -2.0 * w;
    // d2(a^2)/dc2 = (2 sin a - 2a cos a)/sin^3 a -> 2/3 as a -> 0
    const double phi2 = (a < 1e-6) ? 2.0 / 3.0 : 2.0 / s2 - 2.0 * a * c / (s2 * s);
    for (int i = 0; i < 3; ++i)
      for (int j = i; j < 3; ++j) {
        const Matrix3d sym = 0.5 * ((*basis[i]) * (*basis[j]) + (*basis[j]) * (*basis[i]));
        const double d2c = y.dot(sym * gt);
        const double val = (phi2 * dc(i) * dc(j) + phi1 * d2c) / k;
        m.hess(i, j) += val;
        if (i != j) m.hess(j, i) += val;
      }
  }
  m.residual = m.grad.norm() / (2.0 * std::sqrt(2.0));
  return m;
}

}  // namespace

void RegressionDataset::validate() const {
  if (design.size() != observations.size())
    fail(ErrorCode::ShapeMismatch, "dataset: design and observation counts differ");
  if (design.size() < 3) fail(ErrorCode::DegenerateProjection, "dataset: k >= 3 required");
  for (const auto& t : design)
    if (std::abs(t.norm() - 1.0) > 1e-8) fail(ErrorCode::DomainError, "dataset: design point not unit");
  for (const auto& y : observations)
    if (std::abs(y.norm() - 1.0) > 1e-8) fail(ErrorCode::DomainError, "dataset: observation not unit");
}

VectorXd lsq_linear(const RegressionDataset& data, const MatrixXd& gamma,
                    const std::vector<MatrixXd>& tangent_basis) {
  if (data.design.empty()) fail(ErrorCode::ShapeMismatch, "lsq_linear: empty dataset");
  const Eigen::Index rows = gamma.rows(), cols = gamma.cols();
  MatrixXd nu = MatrixXd::Zero(rows, cols);
  MatrixXd tau = MatrixXd::Zero(cols, cols);
  for (size_t l = 0; l < data.k(); ++l) {
    nu += data.observations[l] * data.design[l].transpose();
    tau += data.design[l] * data.design[l].transpose();
  }
  const MatrixXd resid = nu - gamma * tau;
  VectorXd out(static_cast<Eigen::Index>(tangent_basis.size()));
  for (size_t j = 0; j < tangent_basis.size(); ++j)
    out(static_cast<Eigen::Index>(j)) = (resid.array() * tangent_basis[j].array()).sum();
  return out;
}

RegressionFit fit_extrinsic_so3(const RegressionDataset& data) {
  data.validate();
  Matrix3d nu = Matrix3d::Zero();
  Matrix3d tau = Matrix3d::Zero();
  for (size_t l = 0; l < data.k(); ++l) {
    nu += data.observations[l] * data.design[l].transpose();
    tau += data.design[l] * data.design[l].transpose();
  }
  if (md::svd(tau).sigma(2) <= 1e-10)
    fail(ErrorCode::DegenerateProjection, "fit_extrinsic_so3: design covariance is rank deficient");
  RegressionFit fit;
  fit.gamma = md::project_special_orthogonal(nu);
  fit.method = Method::Extrinsic;
  fit.iterations = 0;
  const Matrix3d t = fit.gamma.transpose() * nu;
  fit.residual_norm = (0.5 * (t - t.transpose())).norm();
  fit.converged = true;
  return fit;
}

RegressionFit fit_intrinsic_so3(const RegressionDataset& data, std::optional<Matrix3d> init) {
  data.validate();
  RegressionFit fit;
  fit.method = Method::Intrinsic;
  Matrix3d gamma = init ? *init : fit_extrinsic_so3(data).gamma;

  // The fixed-point map gamma <- Pi_{SO(3)}(nu(gamma)) is tried first each
  // sweep and kept while it contracts the first-order residual by at least
  // a factor 2; once it oscillates or crawls (the alpha/sin alpha weights
  // destroy the contraction at larger noise), a Levenberg-damped Newton step
  // on the intrinsic objective over so(3) is taken instead.
  LocalModel cur = local_model(data, gamma);
  int it = 0;
  for (; it < kMaxIter && cur.residual >= kFocTol; ++it) {
    const Matrix3d nu = weighted_nu(data, gamma);
    bool advanced = false;
    {
      const Matrix3d cand = md::project_special_orthogonal(nu);
      LocalModel next = local_model(data, cand);
      if (next.residual < 0.5 * cur.residual) {
        gamma = cand;
        cur = next;
        advanced = true;
      }
    }
    if (!advanced) {
      Eigen::SelfAdjointEigenSolver<Matrix3d> es(cur.hess);
      double lam = std::max(0.0, 1e-8 - es.eigenvalues()(0));
      for (int attempt = 0; attempt < 60 && !advanced; ++attempt) {
        const Vector3d step = (cur.hess + lam * Matrix3d::Identity()).ldlt().solve(-cur.grad);
        const Matrix3d cand = md::so3_exp(step) * gamma;
        LocalModel next = local_model(data, cand);
        if (next.residual < cur.residual || next.f < cur.f - 1e-12) {
          gamma = cand;
          cur = next;
          advanced = true;
        } else {
          lam = 4.0 * (lam + 1e-8);
        }
      }
      if (!advanced) break;  // no acceptable step; report below
    }
  }

  fit.gamma = gamma;
  fit.iterations = it;
  fit.residual_norm = cur.residual;
  fit.converged = cur.residual < kFocTol;
  for (size_t l = 0; l < data.k(); ++l) {
    const double c = std::clamp(data.observations[l].dot(gamma * data.design[l]), -1.0, 1.0);
    if (std::acos(c) >= kPi - kAntipodeGuard) fit.antipodal_pairs.push_back(static_cast<int>(l));
  }
  if (!fit.antipodal_pairs.empty())
    fail(ErrorCode::AntipodalData,
         "fit_intrinsic_so3: a data pair is antipodal at the final iterate (index " +
             std::to_string(fit.antipodal_pairs.front()) + ")");
  if (!fit.converged)
    fail(ErrorCode::NoConvergence, "fit_intrinsic_so3: no convergence after " +
                                       std::to_string(kMaxIter) + " iterations (residual " +
                                       std::to_string(fit.residual_norm) + ")");
  return fit;
}

double sum_sq_intrinsic(const RegressionDataset& data, const Matrix3d& gamma) {
  double acc = 0.0;
  for (size_t l = 0; l < data.k(); ++l)
    acc += std::pow(sphere::s2_dist(data.observations[l], gamma * data.design[l]), 2);
  return acc / static_cast<double>(data.k());
}

double sum_sq_extrinsic(const RegressionDataset& data, const Matrix3d& gamma) {
  double acc = 0.0;
  for (size_t l = 0; l < data.k(); ++l)
    acc += (data.observations[l] - gamma * data.design[l]).squaredNorm();
  return acc / static_cast<double>(data.k());
}

}  // namespace orbitkit::regression
