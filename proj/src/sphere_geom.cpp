#include "orbitkit/sphere_geom.hpp"

#include <cmath>

#include "orbitkit/errors.hpp"

namespace orbitkit::sphere {

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_2pi(double s) {
  s = std::fmod(s, 2.0 * kPi);
  return s < 0 ? s + 2.0 * kPi : s;
}

/// Gauss-Legendre nodes/weights on [-1, 1] by Newton iteration on P_n.
void gauss_legendre(int n, std::vector<double>& x, std::vector<double>& w) {
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
    double pp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = 0.0;
      for (int j = 0; j < n; ++j) {
        double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * j + 1.0) * z * p1 - j * p2) / (j + 1.0);
      }
      pp = n * (z * p0 - p1) / (z * z - 1.0);
      double z1 = z;
      z = z1 - p0 / pp;
      if (std::abs(z - z1) < 1e-15) break;
    }
    x[i] = -z;
    x[n - 1 - i] = z;
    w[i] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - 1 - i] = w[i];
  }
}
}  // namespace

bool is_unit(const UnitVector& x, double tol) { return std::abs(x.norm() - 1.0) <= tol; }

bool is_rotation(const Rotation& r, double tol) {
  return (r.transpose() * r - Rotation::Identity()).norm() <= tol &&
         std::abs(r.determinant() - 1.0) <= tol;
}

Rotation elementary_rotation(int j, double s) {
  const double c = std::cos(s), sn = std::sin(s);
  Rotation r = Rotation::Identity();
  switch (j) {
    case 1:
      r << 1, 0, 0, 0, c, -sn, 0, sn, c;
      break;
    case 2:
      r << c, 0, sn, 0, 1, 0, -sn, 0, c;
      break;
    case 3:
      r << c, -sn, 0, sn, c, 0, 0, 0, 1;
      break;
    default:
      fail(ErrorCode::DomainError, "elementary_rotation: axis must be 1, 2 or 3");
  }
  return r;
}

double s2_dist(const UnitVector& x, const UnitVector& y) {
  return std::acos(std::clamp(x.dot(y), -1.0, 1.0));
}

Eigen::Vector3d s2_log(const UnitVector& x, const UnitVector& y) {
  const double c = std::clamp(x.dot(y), -1.0, 1.0);
  if (c + 1.0 <= kCutLocusTol)
    fail(ErrorCode::CutLocus, "s2_log: points are antipodal");
  const double alpha = std::acos(c);
  // (alpha/sin alpha) ((x ^ y) ^ x) = (alpha/sin alpha) (y - <x,y> x)
  const Eigen::Vector3d perp = y - c * x;
  double weight;
  if (alpha < 1e-4) {
    const double a2 = alpha * alpha;
    weight = 1.0 + a2 / 6.0 + 7.0 * a2 * a2 / 360.0;
  } else {
    weight = alpha / std::sin(alpha);
  }
  return weight * perp;
}

UnitVector s2_exp(const UnitVector& x, const Eigen::Vector3d& w) {
  if (std::abs(w.dot(x)) > kTangentTol * std::max(1.0, w.norm()))
    fail(ErrorCode::NotTangent, "s2_exp: w is not tangent at x");
  const double t = w.norm();
  if (t < 1e-300) return x;
  return std::cos(t) * x + std::sin(t) * (w / t);
}

EulerAngles euler_from_rotation(const Rotation& r) {
  EulerAngles e;
  const double cb = std::clamp(r(2, 2), -1.0, 1.0);
  e.b = std::acos(cb);
  if (e.b < 1e-9 || e.b > kPi - 1e-9) {
    // gimbal lock: only a +- c determined; convention c = 0
    e.gimbal_lock = true;
    e.c = 0.0;
    e.a = (cb > 0) ? wrap_2pi(std::atan2(r(1, 0), r(0, 0)))
                   : wrap_2pi(std::atan2(-r(1, 0), r(0, 0)));
  } else {
    e.a = wrap_2pi(std::atan2(r(0, 2), -r(1, 2)));
    e.c = wrap_2pi(std::atan2(r(2, 0), r(2, 1)));
  }
  return e;
}

Rotation rotation_from_euler(const EulerAngles& e) {
  return elementary_rotation(3, e.a) * elementary_rotation(1, e.b) * elementary_rotation(3, e.c);
}

UnitVector sample_uniform_s2(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    UnitVector v(n(rng), n(rng), n(rng));
    const double norm = v.norm();
    if (norm > 1e-12) return v / norm;
  }
}

Rotation sample_haar_so3(Rng& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Vector4d q;
  for (;;) {
    q << n(rng), n(rng), n(rng), n(rng);
    const double norm = q.norm();
    if (norm > 1e-12) {
      q /= norm;
      break;
    }
  }
  const double w = q(0), x = q(1), y = q(2), z = q(3);
  Rotation r;
  r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return r;
}

QuadratureRule<UnitVector> quad_s2(int order) {
  if (order < 2) fail(ErrorCode::DomainError, "quad_s2: order must be >= 2");
  std::vector<double> t, w;
  gauss_legendre(order, t, w);
  const int m = 2 * order + 1;  // azimuthal trapezoid, exact for modes < m
  QuadratureRule<UnitVector> rule;
  rule.exactness_degree = order;
  rule.nodes.reserve(static_cast<size_t>(order) * m);
  rule.weights.reserve(static_cast<size_t>(order) * m);
  for (int i = 0; i < order; ++i) {
    const double cb = t[i];
    const double sb = std::sqrt(std::max(0.0, 1.0 - cb * cb));
    for (int j = 0; j < m; ++j) {
      const double a = 2.0 * kPi * j / m;
      rule.nodes.emplace_back(sb * std::cos(a), sb * std::sin(a), cb);
      rule.weights.push_back(w[i] / 2.0 / m);
    }
  }
  return rule;
}

QuadratureRule<Rotation> quad_so3(int order) {
  if (order < 2) fail(ErrorCode::DomainError, "quad_so3: order must be >= 2");
  std::vector<double> t, w;
  gauss_legendre(order, t, w);
  const int m = 2 * order + 1;
  QuadratureRule<Rotation> rule;
  rule.exactness_degree = order;
  rule.nodes.reserve(static_cast<size_t>(order) * m * m);
  rule.weights.reserve(static_cast<size_t>(order) * m * m);
  // Haar measure in 3-1-3 Euler angles: (1/8 pi^2) sin b da db dc
  for (int i = 0; i < order; ++i) {
    const double b = std::acos(t[i]);
    for (int j = 0; j < m; ++j) {
      const double a = 2.0 * kPi * j / m;
      const Rotation ra_rb = elementary_rotation(3, a) * elementary_rotation(1, b);
      for (int l = 0; l < m; ++l) {
        const double c = 2.0 * kPi * l / m;
        rule.nodes.push_back(ra_rb * elementary_rotation(3, c));
        rule.weights.push_back(w[i] / 2.0 / (m * m));
      }
    }
  }
  return rule;
}

}  // namespace orbitkit::sphere
