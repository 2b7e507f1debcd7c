#include "orbitkit/orbits.hpp"

#include <cmath>

#include "orbitkit/errors.hpp"
#include "orbitkit/matdecomp.hpp"
#include "orbitkit/sphere_geom.hpp"

namespace orbitkit::orbits {

namespace md = orbitkit::matdecomp;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

const char* to_string(OrbitKind k) {
  switch (k) {
    case OrbitKind::Sphere: return "Sphere";
    case OrbitKind::Stiefel: return "Stiefel";
    case OrbitKind::Grassmannian: return "Grassmannian";
    case OrbitKind::SvdOrbit: return "SvdOrbit";
    case OrbitKind::LagrangianGrassmannian: return "LagrangianGrassmannian";
    case OrbitKind::IsotropicGrassmannian: return "IsotropicGrassmannian";
    case OrbitKind::ComplexStructures: return "ComplexStructures";
    case OrbitKind::CompactGroup: return "CompactGroup";
  }
  return "?";
}

OrbitSpec OrbitSpec::sphere(int n) {
  if (n < 1) fail(ErrorCode::DomainError, "Sphere: n >= 1 required");
  return {OrbitKind::Sphere, 1, n, {}, 0, 0};
}
OrbitSpec OrbitSpec::stiefel(int k, int n) {
  if (k < 1 || k > n) fail(ErrorCode::DomainError, "Stiefel: 1 <= k <= n required");
  return {OrbitKind::Stiefel, k, n, {}, 0, 0};
}
OrbitSpec OrbitSpec::grassmannian(int k, int n) {
  if (k < 1 || k > n) fail(ErrorCode::DomainError, "Grassmannian: 1 <= k <= n required");
  return {OrbitKind::Grassmannian, k, n, {}, 0, 0};
}
OrbitSpec OrbitSpec::svd_orbit(const VectorXd& base_sigma, int rows, int cols) {
  if (base_sigma.size() != std::min(rows, cols))
    fail(ErrorCode::DomainError, "SvdOrbit: base needs min(rows, cols) singular values");
  for (Eigen::Index i = 0; i < base_sigma.size(); ++i) {
    if (base_sigma(i) < 0) fail(ErrorCode::DomainError, "SvdOrbit: base singular values must be >= 0");
    if (i && base_sigma(i) > base_sigma(i - 1) + 1e-15)
      fail(ErrorCode::DomainError, "SvdOrbit: base singular values must be descending");
  }
  OrbitSpec s{OrbitKind::SvdOrbit, 0, std::max(rows, cols), base_sigma, rows, cols};
  return s;
}
OrbitSpec OrbitSpec::lagrangian(int n) {
  if (n < 1) fail(ErrorCode::DomainError, "LagrangianGrassmannian: n >= 1 required");
  return {OrbitKind::LagrangianGrassmannian, n, n, {}, 0, 0};
}
OrbitSpec OrbitSpec::isotropic(int k, int n) {
  if (k < 1 || k > n) fail(ErrorCode::DomainError, "IsotropicGrassmannian: 1 <= k <= n required");
  return {OrbitKind::IsotropicGrassmannian, k, n, {}, 0, 0};
}
OrbitSpec OrbitSpec::complex_structures(int two_n) {
  if (two_n < 2 || two_n % 2 != 0)
    fail(ErrorCode::DomainError, "ComplexStructures: even dimension >= 2 required");
  return {OrbitKind::ComplexStructures, two_n / 2, two_n, {}, 0, 0};
}
OrbitSpec OrbitSpec::special_orthogonal(int n) {
  if (n < 2) fail(ErrorCode::DomainError, "CompactGroup: n >= 2 required");
  return {OrbitKind::CompactGroup, n, n, {}, 0, 0};
}

namespace {

double scale_of(const MatrixXd& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }
double scale_of(const MatrixXcd& x) { return std::max(1.0, x.cwiseAbs().maxCoeff()); }

const MatrixXd& as_real(const OrbitValue& v, const char* who) {
  if (!std::holds_alternative<MatrixXd>(v))
    fail(ErrorCode::ShapeMismatch, std::string(who) + ": expected a real matrix");
  return std::get<MatrixXd>(v);
}
const MatrixXcd& as_complex(const OrbitValue& v, const char* who) {
  if (!std::holds_alternative<MatrixXcd>(v))
    fail(ErrorCode::ShapeMismatch, std::string(who) + ": expected a complex matrix");
  return std::get<MatrixXcd>(v);
}

void require_shape(const OrbitSpec& spec, Eigen::Index rows, Eigen::Index cols,
                   Eigen::Index want_r, Eigen::Index want_c) {
  if (rows != want_r || cols != want_c)
    fail(ErrorCode::ShapeMismatch, std::string(to_string(spec.kind)) + ": expected " +
                                       std::to_string(want_r) + "x" + std::to_string(want_c) +
                                       ", got " + std::to_string(rows) + "x" + std::to_string(cols));
}

VectorXd complex_singular_values(const MatrixXcd& x) {
  return Eigen::JacobiSVD<MatrixXcd>(x).singularValues();
}

/// Standard complex structure: n diagonal blocks [[0,-1],[1,0]].
MatrixXd standard_complex_structure(int two_n) {
  MatrixXd th = MatrixXd::Zero(two_n, two_n);
  for (int i = 0; i < two_n / 2; ++i) {
    th(2 * i, 2 * i + 1) = -1.0;
    th(2 * i + 1, 2 * i) = 1.0;
  }
  return th;
}

/// Orthogonal g with g' x g in the sign pattern of the standard structure
/// (blocks [[0,-a],[a,0]], a > 0 descending) and det g = +1 on the correct
/// orientation component. The skew_canonical factor has det = sign Pf(x); the
/// per-block reflection used to flip the sign pattern contributes (-1)^n.
struct OrientedSkewFactor {
  MatrixXd g;
  VectorXd a;
  bool right_component;
};

OrientedSkewFactor oriented_skew_factor(const MatrixXd& x) {
  md::SkewCanonical sc = md::skew_canonical(x);
  const int n = static_cast<int>(x.rows()) / 2;
  OrientedSkewFactor out;
  out.a = sc.block_values;
  out.g = sc.g;
  for (int i = 0; i < n; ++i) out.g.col(2 * i + 1) = -out.g.col(2 * i + 1);
  const double det_after = sc.det_g * ((n % 2) ? -1.0 : 1.0);
  out.right_component = det_after > 0;
  return out;
}

TubeCheck ok() { return {true, ""}; }
TubeCheck bad(std::string why) { return {false, std::move(why)}; }

}  // namespace

TubeCheck in_tube(const OrbitSpec& spec, const OrbitValue& x) {
  switch (spec.kind) {
    case OrbitKind::Sphere: {
      const MatrixXd& v = as_real(x, "in_tube");
      if (!((v.rows() == spec.n && v.cols() == 1) || (v.rows() == 1 && v.cols() == spec.n)))
        fail(ErrorCode::ShapeMismatch, "Sphere: expected a vector of length " + std::to_string(spec.n));
      if (v.norm() <= 1e-12) return bad("zero vector has no nearest point on the sphere");
      return ok();
    }
    case OrbitKind::Stiefel: {
      const MatrixXd& v = as_real(x, "in_tube");
      require_shape(spec, v.rows(), v.cols(), spec.n, spec.k);
      const VectorXd s = md::svd(v).sigma;
      if (s(s.size() - 1) <= kGapTol * scale_of(v))
        return bad("rank deficient: sigma_min = " + std::to_string(s(s.size() - 1)));
      return ok();
    }
    case OrbitKind::Grassmannian: {
      const MatrixXd& v = as_real(x, "in_tube");
      require_shape(spec, v.rows(), v.cols(), spec.n, spec.n);
      if ((v - v.transpose()).norm() > 1e-9 * scale_of(v))
        fail(ErrorCode::ShapeMismatch, "Grassmannian: input must be symmetric");
      if (spec.k == spec.n) return ok();  // Gr_n(E^n) is the single point I
      const VectorXd ev = md::spectral(0.5 * (v + v.transpose())).eigenvalues;
      const double gap = ev(spec.k - 1) - ev(spec.k);
      if (gap <= kGapTol * scale_of(v))
        return bad("eigenvalue gap lambda_k - lambda_{k+1} = " + std::to_string(gap) + " too small");
      return ok();
    }
    case OrbitKind::SvdOrbit: {
      const MatrixXd& v = as_real(x, "in_tube");
      require_shape(spec, v.rows(), v.cols(), spec.rows, spec.cols);
      const VectorXd s = md::svd(v).sigma;
      const VectorXd& b = spec.base_sigma;
      // x may collide only where the base collides: demand a gap in x at every
      // strict gap of the base (including the trailing value-vs-zero boundary).
      for (Eigen::Index i = 0; i + 1 < b.size(); ++i) {
        if (b(i) - b(i + 1) > 1e-12 && s(i) - s(i + 1) <= kGapTol * scale_of(v))
          return bad("singular values of x collide at position " + std::to_string(i) +
                     " where the base point separates");
      }
      return ok();
    }
    case OrbitKind::LagrangianGrassmannian: {
      const MatrixXcd& v = as_complex(x, "in_tube");
      require_shape(spec, v.rows(), v.cols(), spec.n, spec.n);
      if ((v - v.transpose()).norm() > 1e-9 * scale_of(v))
        fail(ErrorCode::ShapeMismatch, "LagrangianGrassmannian: input must be complex symmetric");
      const VectorXd s = complex_singular_values(v);
      if (s(s.size() - 1) <= kGapTol * scale_of(v))
        return bad("singular input: sigma_min = " + std::to_string(s(s.size() - 1)));
      return ok();
    }
    case OrbitKind::IsotropicGrassmannian: {
      const MatrixXcd& v = as_complex(x, "in_tube");
      require_shape(spec, v.rows(), v.cols(), spec.n, spec.n);
      if ((v - v.transpose()).norm() > 1e-9 * scale_of(v))
        fail(ErrorCode::ShapeMismatch, "IsotropicGrassmannian: input must be complex symmetric");
      const VectorXd s = complex_singular_values(v);
      const double gap = s(spec.k - 1) - (spec.k < spec.n ? s(spec.k) : 0.0);
      if (gap <= kGapTol * scale_of(v))
        return bad("singular-value gap sigma_k - sigma_{k+1} = " + std::to_string(gap) + " too small");
      return ok();
    }
    case OrbitKind::ComplexStructures: {
      const MatrixXd& v = as_real(x, "in_tube");
      require_shape(spec, v.rows(), v.cols(), spec.n, spec.n);
      if ((v + v.transpose()).norm() > 1e-9 * scale_of(v))
        fail(ErrorCode::ShapeMismatch, "ComplexStructures: input must be skew-symmetric");
      OrientedSkewFactor f = oriented_skew_factor(0.5 * (v - v.transpose()));
      if (f.a.size() == 0 || f.a(f.a.size() - 1) <= kGapTol * scale_of(v))
        return bad("det x = 0 within tolerance");
      if (!f.right_component)
        return bad("wrong orientation component (Pfaffian sign differs from the base point)");
      return ok();
    }
    case OrbitKind::CompactGroup: {
      const MatrixXd& v = as_real(x, "in_tube");
      require_shape(spec, v.rows(), v.cols(), spec.n, spec.n);
      md::SvdDecomp d = md::svd(v);
      const double det_uv = (d.u * d.v.transpose()).determinant() > 0 ? 1.0 : -1.0;
      const double margin = d.sigma(spec.n - 2) + d.sigma(spec.n - 1) * det_uv;
      if (margin <= kGapTol * scale_of(v))
        return bad("nearest rotation not unique: sigma_{n-1} + sigma_n det(uv') = " +
                   std::to_string(margin));
      return ok();
    }
  }
  fail(ErrorCode::DomainError, "in_tube: unknown orbit kind");
}

OrbitPoint project(const OrbitSpec& spec, const OrbitValue& x) {
  TubeCheck t = in_tube(spec, x);
  if (!t.inside) fail(ErrorCode::OutsideTube, std::string(to_string(spec.kind)) + ": " + t.diagnostic);
  switch (spec.kind) {
    case OrbitKind::Sphere: {
      MatrixXd v = as_real(x, "project");
      return {spec, MatrixXd(v / v.norm())};
    }
    case OrbitKind::Stiefel: {
      const MatrixXd& v = as_real(x, "project");
      md::SvdDecomp d = md::svd(v);
      // x (x'x)^{-1/2} = U V' on the thin factors
      return {spec, MatrixXd(d.u.leftCols(spec.k) * d.v.transpose())};
    }
    case OrbitKind::Grassmannian: {
      const MatrixXd& v = as_real(x, "project");
      md::SpectralDecomp d = md::spectral(0.5 * (v + v.transpose()));
      const MatrixXd q = d.eigenvectors.leftCols(spec.k);
      return {spec, MatrixXd(q * q.transpose())};
    }
    case OrbitKind::SvdOrbit: {
      const MatrixXd& v = as_real(x, "project");
      Eigen::JacobiSVD<MatrixXd> s(v, Eigen::ComputeFullU | Eigen::ComputeFullV);
      MatrixXd theta = MatrixXd::Zero(spec.rows, spec.cols);
      for (Eigen::Index i = 0; i < spec.base_sigma.size(); ++i) theta(i, i) = spec.base_sigma(i);
      return {spec, MatrixXd(s.matrixU() * theta * s.matrixV().transpose())};
    }
    case OrbitKind::LagrangianGrassmannian: {
      const MatrixXcd& v = as_complex(x, "project");
      md::TakagiDecomp d = md::takagi(0.5 * (v + v.transpose()));
      return {spec, MatrixXcd(d.unitary * d.unitary.transpose())};
    }
    case OrbitKind::IsotropicGrassmannian: {
      const MatrixXcd& v = as_complex(x, "project");
      md::TakagiDecomp d = md::takagi_allow_singular(0.5 * (v + v.transpose()));
      const MatrixXcd q = d.unitary.leftCols(spec.k);
      return {spec, MatrixXcd(q * q.transpose())};
    }
    case OrbitKind::ComplexStructures: {
      const MatrixXd& v = as_real(x, "project");
      OrientedSkewFactor f = oriented_skew_factor(0.5 * (v - v.transpose()));
      const MatrixXd th = standard_complex_structure(spec.n);
      return {spec, MatrixXd(f.g * th * f.g.transpose())};
    }
    case OrbitKind::CompactGroup: {
      const MatrixXd& v = as_real(x, "project");
      return {spec, MatrixXd(md::project_special_orthogonal(v))};
    }
  }
  fail(ErrorCode::DomainError, "project: unknown orbit kind");
}

bool on_orbit(const OrbitSpec& spec, const OrbitValue& v, double tol) {
  switch (spec.kind) {
    case OrbitKind::Sphere: {
      const MatrixXd& m = std::get<MatrixXd>(v);
      return std::abs(m.norm() - 1.0) <= tol;
    }
    case OrbitKind::Stiefel: {
      const MatrixXd& m = std::get<MatrixXd>(v);
      return (m.transpose() * m - MatrixXd::Identity(spec.k, spec.k)).norm() <= tol;
    }
    case OrbitKind::Grassmannian: {
      const MatrixXd& m = std::get<MatrixXd>(v);
      return (m - m.transpose()).norm() <= tol && (m * m - m).norm() <= tol &&
             std::abs(m.trace() - spec.k) <= tol;
    }
    case OrbitKind::SvdOrbit: {
      const MatrixXd& m = std::get<MatrixXd>(v);
      if (m.rows() != spec.rows || m.cols() != spec.cols) return false;
      VectorXd s = md::svd(m).sigma;
      return (s - spec.base_sigma).norm() <= tol * std::sqrt(double(s.size()));
    }
    case OrbitKind::LagrangianGrassmannian: {
      const MatrixXcd& m = std::get<MatrixXcd>(v);
      return (m - m.transpose()).norm() <= tol &&
             (m * m.adjoint() - MatrixXcd::Identity(spec.n, spec.n)).norm() <= tol;
    }
    case OrbitKind::IsotropicGrassmannian: {
      const MatrixXcd& m = std::get<MatrixXcd>(v);
      if ((m - m.transpose()).norm() > tol) return false;
      VectorXd s = complex_singular_values(m);
      for (int i = 0; i < spec.n; ++i) {
        const double want = i < spec.k ? 1.0 : 0.0;
        if (std::abs(s(i) - want) > tol) return false;
      }
      return true;
    }
    case OrbitKind::ComplexStructures: {
      const MatrixXd& m = std::get<MatrixXd>(v);
      const int n2 = spec.n;
      if ((m * m + MatrixXd::Identity(n2, n2)).norm() > tol) return false;
      if ((m.transpose() * m - MatrixXd::Identity(n2, n2)).norm() > tol) return false;
      return oriented_skew_factor(0.5 * (m - m.transpose())).right_component;
    }
    case OrbitKind::CompactGroup: {
      const MatrixXd& m = std::get<MatrixXd>(v);
      return (m.transpose() * m - MatrixXd::Identity(spec.n, spec.n)).norm() <= tol &&
             std::abs(m.determinant() - 1.0) <= tol;
    }
  }
  return false;
}

OrbitValue base_point(const OrbitSpec& spec) {
  switch (spec.kind) {
    case OrbitKind::Sphere: {
      MatrixXd e = MatrixXd::Zero(spec.n, 1);
      e(0, 0) = 1.0;
      return e;
    }
    case OrbitKind::Stiefel:
      return MatrixXd(MatrixXd::Identity(spec.n, spec.k));
    case OrbitKind::Grassmannian: {
      MatrixXd th = MatrixXd::Zero(spec.n, spec.n);
      th.topLeftCorner(spec.k, spec.k).setIdentity();
      return th;
    }
    case OrbitKind::SvdOrbit: {
      MatrixXd th = MatrixXd::Zero(spec.rows, spec.cols);
      for (Eigen::Index i = 0; i < spec.base_sigma.size(); ++i) th(i, i) = spec.base_sigma(i);
      return th;
    }
    case OrbitKind::LagrangianGrassmannian:
      return MatrixXcd(MatrixXcd::Identity(spec.n, spec.n));
    case OrbitKind::IsotropicGrassmannian: {
      MatrixXcd th = MatrixXcd::Zero(spec.n, spec.n);
      th.topLeftCorner(spec.k, spec.k).setIdentity();
      return th;
    }
    case OrbitKind::ComplexStructures:
      return standard_complex_structure(spec.n);
    case OrbitKind::CompactGroup:
      return MatrixXd(MatrixXd::Identity(spec.n, spec.n));
  }
  fail(ErrorCode::DomainError, "base_point: unknown orbit kind");
}

namespace {

MatrixXd haar_orthogonal(int n, Rng& rng, bool special) {
  std::normal_distribution<double> nd(0.0, 1.0);
  MatrixXd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = nd(rng);
  Eigen::HouseholderQR<MatrixXd> qr(a);
  MatrixXd q = qr.householderQ();
  MatrixXd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i)
    if (r(i, i) < 0) q.col(i) = -q.col(i);
  if (!special) {
    // cover both components of O(n)
    if (std::uniform_int_distribution<int>(0, 1)(rng)) q.col(0) = -q.col(0);
  } else if (q.determinant() < 0) {
    q.col(0) = -q.col(0);
  }
  return q;
}

MatrixXcd haar_unitary(int n, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  MatrixXcd a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = std::complex<double>(nd(rng), nd(rng));
  Eigen::HouseholderQR<MatrixXcd> qr(a);
  MatrixXcd q = qr.householderQ();
  MatrixXcd r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    std::complex<double> d = r(i, i);
    if (std::abs(d) > 1e-300) q.col(i) *= d / std::abs(d);
  }
  return q;
}

}  // namespace

GroupElement random_group_element(const OrbitSpec& spec, Rng& rng) {
  GroupElement g;
  switch (spec.kind) {
    case OrbitKind::Sphere:
    case OrbitKind::Stiefel:
      g.left = haar_orthogonal(spec.n, rng, false).cast<std::complex<double>>();
      break;
    case OrbitKind::Grassmannian:
      g.left = haar_orthogonal(spec.n, rng, false).cast<std::complex<double>>();
      break;
    case OrbitKind::SvdOrbit:
      g.left = haar_orthogonal(spec.rows, rng, false).cast<std::complex<double>>();
      g.right = haar_orthogonal(spec.cols, rng, false).cast<std::complex<double>>();
      break;
    case OrbitKind::LagrangianGrassmannian:
    case OrbitKind::IsotropicGrassmannian:
      g.left = haar_unitary(spec.n, rng);
      break;
    case OrbitKind::ComplexStructures:
      g.left = haar_orthogonal(spec.n, rng, true).cast<std::complex<double>>();
      break;
    case OrbitKind::CompactGroup:
      g.left = haar_orthogonal(spec.n, rng, true).cast<std::complex<double>>();
      break;
  }
  return g;
}

OrbitValue act(const OrbitSpec& spec, const GroupElement& g, const OrbitValue& x) {
  switch (spec.kind) {
    case OrbitKind::Sphere: {
      const MatrixXd& v = std::get<MatrixXd>(x);
      if (v.rows() == 1 && v.cols() > 1) return MatrixXd((g.left.real() * v.transpose()).transpose());
      return MatrixXd(g.left.real() * v);
    }
    case OrbitKind::Stiefel:
    case OrbitKind::CompactGroup: {
      const MatrixXd& v = std::get<MatrixXd>(x);
      return MatrixXd(g.left.real() * v);
    }
    case OrbitKind::Grassmannian:
    case OrbitKind::ComplexStructures: {
      const MatrixXd& v = std::get<MatrixXd>(x);
      return MatrixXd(g.left.real() * v * g.left.real().transpose());
    }
    case OrbitKind::SvdOrbit: {
      const MatrixXd& v = std::get<MatrixXd>(x);
      return MatrixXd(g.left.real() * v * g.right.real().transpose());
    }
    case OrbitKind::LagrangianGrassmannian:
    case OrbitKind::IsotropicGrassmannian: {
      const MatrixXcd& v = std::get<MatrixXcd>(x);
      return MatrixXcd(g.left * v * g.left.transpose());
    }
  }
  fail(ErrorCode::DomainError, "act: unknown orbit kind");
}

double equivariance_check(const OrbitSpec& spec, const OrbitValue& x, const GroupElement& g) {
  OrbitPoint px = project(spec, x);
  OrbitValue gx = act(spec, g, x);
  OrbitPoint pgx = project(spec, gx);
  OrbitValue g_px = act(spec, g, px.value);
  if (spec.is_complex())
    return (std::get<MatrixXcd>(pgx.value) - std::get<MatrixXcd>(g_px)).norm();
  return (std::get<MatrixXd>(pgx.value) - std::get<MatrixXd>(g_px)).norm();
}

Eigen::MatrixXd low_rank_project(const Eigen::MatrixXd& x, int l) {
  const Eigen::Index r = std::min(x.rows(), x.cols());
  if (l < 1 || l > r) fail(ErrorCode::DomainError, "low_rank_project: 1 <= l <= min(rows, cols)");
  Eigen::JacobiSVD<MatrixXd> s(x, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const VectorXd& sig = s.singularValues();
  const double tol = kGapTol * scale_of(x);
  if (sig(l - 1) <= tol)
    fail(ErrorCode::RankGapViolation, "low_rank_project: fewer than l singular values above tolerance");
  if (l < r && sig(l - 1) - sig(l) <= tol)
    fail(ErrorCode::RankGapViolation, "low_rank_project: sigma_l is not separated from sigma_{l+1}");
  MatrixXd trunc = MatrixXd::Zero(x.rows(), x.cols());
  for (int i = 0; i < l; ++i) trunc(i, i) = sig(i);
  return s.matrixU() * trunc * s.matrixV().transpose();
}

Eigen::MatrixXd stiefel_project_to_base(const Eigen::MatrixXd& x, const Eigen::MatrixXd& theta) {
  if (x.rows() != theta.rows() || x.cols() != theta.cols())
    fail(ErrorCode::ShapeMismatch, "stiefel_project_to_base: shape mismatch with base frame");
  md::SvdDecomp d = md::svd(x);
  if (d.sigma(d.sigma.size() - 1) <= kGapTol * scale_of(x))
    fail(ErrorCode::OutsideTube, "stiefel_project_to_base: rank-deficient input");
  const MatrixXd tau = md::sym_sqrt(theta.transpose() * theta);
  return d.u.leftCols(x.cols()) * d.v.transpose() * tau;
}

}  // namespace orbitkit::orbits
