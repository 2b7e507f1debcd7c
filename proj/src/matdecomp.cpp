#include "orbitkit/matdecomp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "orbitkit/errors.hpp"

namespace orbitkit::matdecomp {

namespace {

void require_square(const RealMatrix& m, const char* who) {
  if (m.rows() != m.cols()) fail(ErrorCode::ShapeMismatch, std::string(who) + ": matrix must be square");
}

double sym_defect(const RealMatrix& m) {
  return (m - m.transpose()).norm() / std::max(1.0, m.norm());
}

}  // namespace

SpectralDecomp spectral(const RealMatrix& m) {
  require_square(m, "spectral");
  if (sym_defect(m) > kSymmetryTol)
    fail(ErrorCode::NotSymmetric, "spectral: input is not symmetric");
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()));
  const Eigen::Index n = m.rows();
  SpectralDecomp out;
  out.eigenvalues.resize(n);
  out.eigenvectors.resize(n, n);
  // Eigen returns ascending order; flip to descending.
  for (Eigen::Index i = 0; i < n; ++i) {
    out.eigenvalues(i) = es.eigenvalues()(n - 1 - i);
    out.eigenvectors.col(i) = es.eigenvectors().col(n - 1 - i);
  }
  return out;
}

SvdDecomp svd(const RealMatrix& m) {
  Eigen::JacobiSVD<RealMatrix> s(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return {s.matrixU(), s.singularValues(), s.matrixV()};
}

RealMatrix sym_sqrt(const RealMatrix& m) {
  require_square(m, "sym_sqrt");
  if (sym_defect(m) > kSymmetryTol)
    fail(ErrorCode::NotSymmetric, "sym_sqrt: input is not symmetric");
  SpectralDecomp d = spectral(m);
  const double floor = kPdTol * std::max(1.0, m.norm());
  if (d.eigenvalues.minCoeff() <= floor)
    fail(ErrorCode::NotPositiveDefinite, "sym_sqrt: smallest eigenvalue below tolerance");
  Eigen::VectorXd roots = d.eigenvalues.array().sqrt();
  return d.eigenvectors * roots.asDiagonal() * d.eigenvectors.transpose();
}

PolarDecomp polar(const RealMatrix& m) {
  require_square(m, "polar");
  SvdDecomp d = svd(m);
  const double smax = d.sigma(0);
  // |det| > tol * ||m||^n, phrased on the singular-value ratios
  double ratio = 1.0;
  for (Eigen::Index i = 0; i < d.sigma.size(); ++i) ratio *= d.sigma(i) / std::max(smax, 1e-300);
  if (smax == 0.0 || ratio <= kSingularTol)
    fail(ErrorCode::SingularInput, "polar: input is numerically singular");
  RealMatrix g = d.u * d.v.transpose();
  RealMatrix p = d.v * d.sigma.asDiagonal() * d.v.transpose();
  return {g, p};
}

RealMatrix project_special_orthogonal(const RealMatrix& m) {
  require_square(m, "project_special_orthogonal");
  const Eigen::Index n = m.rows();
  SvdDecomp d = svd(m);
  const double det_uv = (d.u * d.v.transpose()).determinant() > 0 ? 1.0 : -1.0;
  if (n >= 2) {
    const double margin = d.sigma(n - 2) + d.sigma(n - 1) * det_uv;
    if (margin <= kSingularTol * std::max(1.0, d.sigma(0)))
      fail(ErrorCode::DegenerateProjection,
           "project_special_orthogonal: nearest rotation is not unique (sigma_{n-1} + sigma_n det <= 0)");
  }
  Eigen::VectorXd corr = Eigen::VectorXd::Ones(n);
  corr(n - 1) = det_uv;
  return d.u * corr.asDiagonal() * d.v.transpose();
}

namespace {

/// Principal square root of a (numerically normal) complex matrix via Schur +
/// Parlett recurrence. Only used on symmetric unitary inputs.
ComplexMatrix schur_sqrt(const ComplexMatrix& q) {
  Eigen::ComplexSchur<ComplexMatrix> sch(q);
  const ComplexMatrix& t = sch.matrixT();
  const ComplexMatrix& z = sch.matrixU();
  const Eigen::Index n = t.rows();
  ComplexMatrix r = ComplexMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) r(i, i) = std::sqrt(t(i, i));
  for (Eigen::Index d = 1; d < n; ++d) {
    for (Eigen::Index i = 0; i + d < n; ++i) {
      const Eigen::Index j = i + d;
      std::complex<double> s = t(i, j);
      for (Eigen::Index k = i + 1; k < j; ++k) s -= r(i, k) * r(k, j);
      const std::complex<double> denom = r(i, i) + r(j, j);
      r(i, j) = (std::abs(denom) > 1e-300) ? s / denom : std::complex<double>(0, 0);
    }
  }
  return z * r * z.adjoint();
}

TakagiDecomp takagi_impl(const ComplexMatrix& m, bool allow_singular) {
  if (m.rows() != m.cols()) fail(ErrorCode::ShapeMismatch, "takagi: matrix must be square");
  if ((m - m.transpose()).norm() > kSymmetryTol * std::max(1.0, m.norm()))
    fail(ErrorCode::NotComplexSymmetric, "takagi: input is not complex symmetric");
  Eigen::JacobiSVD<ComplexMatrix> s(0.5 * (m + m.transpose()),
                                    Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd sig = s.singularValues();
  if (!allow_singular && sig(sig.size() - 1) <= kSingularTol * std::max(1.0, sig(0)))
    fail(ErrorCode::SingularInput, "takagi: input is numerically singular");
  // m = U S V^H and m = m^T force Q = U^H conj(V) to be a symmetric unitary
  // commuting with S; its principal square root gives the Takagi factor
  // g = U Q^{1/2}.
  const ComplexMatrix q0 = s.matrixU().adjoint() * s.matrixV().conjugate();
  const ComplexMatrix q = 0.5 * (q0 + q0.transpose());
  TakagiDecomp out;
  out.unitary = s.matrixU() * schur_sqrt(q);
  out.sigma = sig;
  return out;
}

}  // namespace

TakagiDecomp takagi(const ComplexMatrix& m) { return takagi_impl(m, false); }
TakagiDecomp takagi_allow_singular(const ComplexMatrix& m) { return takagi_impl(m, true); }

SkewCanonical skew_canonical(const RealMatrix& m) {
  require_square(m, "skew_canonical");
  const Eigen::Index n2 = m.rows();
  if (n2 % 2 != 0) fail(ErrorCode::ShapeMismatch, "skew_canonical: dimension must be even");
  if ((m + m.transpose()).norm() > kSymmetryTol * std::max(1.0, m.norm()))
    fail(ErrorCode::NotSkewSymmetric, "skew_canonical: input is not skew-symmetric");
  const RealMatrix ms = 0.5 * (m - m.transpose());

  // i*m is Hermitian with eigenvalues {+-a_i}; the real and imaginary parts of
  // an eigenvector for +a_i span the invariant 2-plane of the block.
  ComplexMatrix h = std::complex<double>(0, 1) * ms.cast<std::complex<double>>();
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(h);
  const Eigen::VectorXd ev = es.eigenvalues();  // ascending
  const double scale = std::max(1.0, ev.cwiseAbs().maxCoeff());
  const double zero_tol = 1e-13 * scale;

  struct Pair {
    double a;
    Eigen::VectorXd u, v;
  };
  std::vector<Pair> pairs;
  for (Eigen::Index i = n2 - 1; i >= 0; --i) {
    if (ev(i) <= zero_tol) break;  // only the positive half
    Eigen::VectorXcd w = es.eigenvectors().col(i);
    Pair p;
    p.a = ev(i);
    p.u = std::sqrt(2.0) * w.real();
    p.v = std::sqrt(2.0) * w.imag();
    pairs.push_back(std::move(p));
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) { return a.a > b.a; });

  const Eigen::Index r = static_cast<Eigen::Index>(pairs.size());
  RealMatrix g(n2, n2);
  Eigen::VectorXd avals = Eigen::VectorXd::Zero(n2 / 2);
  for (Eigen::Index i = 0; i < r; ++i) {
    // column order (v, u) realizes the block [[0,a],[-a,0]]
    g.col(2 * i) = pairs[i].v;
    g.col(2 * i + 1) = pairs[i].u;
    avals(i) = pairs[i].a;
  }
  if (2 * r < n2) {
    // kernel = orthogonal complement of the nonzero blocks
    RealMatrix proj = RealMatrix::Identity(n2, n2);
    if (r > 0) proj -= g.leftCols(2 * r) * g.leftCols(2 * r).transpose();
    Eigen::JacobiSVD<RealMatrix> ks(proj, Eigen::ComputeFullU);
    g.rightCols(n2 - 2 * r) = ks.matrixU().leftCols(n2 - 2 * r);
  }

  double det = g.determinant() > 0 ? 1.0 : -1.0;
  if (det < 0 && 2 * r < n2) {
    g.col(n2 - 1) = -g.col(n2 - 1);  // a kernel column is free
    det = 1.0;
  }

  RealMatrix alpha = RealMatrix::Zero(n2, n2);
  for (Eigen::Index i = 0; i < n2 / 2; ++i) {
    alpha(2 * i, 2 * i + 1) = avals(i);
    alpha(2 * i + 1, 2 * i) = -avals(i);
  }
  return {g, alpha, avals, det};
}

Eigen::Matrix3d so3_hat(const Eigen::Vector3d& w) {
  Eigen::Matrix3d k;
  k << 0, -w.z(), w.y(), w.z(), 0, -w.x(), -w.y(), w.x(), 0;
  return k;
}

Eigen::Matrix3d so3_exp(const Eigen::Vector3d& w) {
  const double th = w.norm();
  if (th < 1e-12) {
    const Eigen::Matrix3d k = so3_hat(w);
    return Eigen::Matrix3d::Identity() + k + 0.5 * k * k;
  }
  const Eigen::Matrix3d k = so3_hat(w / th);
  return Eigen::Matrix3d::Identity() + std::sin(th) * k + (1.0 - std::cos(th)) * k * k;
}

Eigen::Vector3d so3_log(const Eigen::Matrix3d& r) {
  const double tr = std::clamp((r.trace() - 1.0) / 2.0, -1.0, 1.0);
  if (r.trace() <= -1.0 + kCutLocusTol)
    fail(ErrorCode::CutLocus, "so3_log: rotation angle at or beyond pi");
  const double th = std::acos(tr);
  Eigen::Vector3d axis(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
  if (th < 1e-7) return 0.5 * axis;  // sin th ~ th
  return (th / (2.0 * std::sin(th))) * axis;
}

}  // namespace orbitkit::matdecomp
