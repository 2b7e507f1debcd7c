#include "orbitkit/bayes_estimator.hpp"

#include <cmath>

#include "orbitkit/errors.hpp"
#include "orbitkit/matdecomp.hpp"
#include "orbitkit/sphere_geom.hpp"

namespace orbitkit::bayes {

namespace md = orbitkit::matdecomp;
using Eigen::MatrixXd;
using Eigen::Vector3d;
using Eigen::VectorXd;

LinearPrior LinearPrior::for_sphere(const VectorXd& v, double alpha) {
  if (alpha < 0.0) fail(ErrorCode::PriorInvalid, "alpha must be >= 0");
  if (alpha > 0.0) {
    if (std::abs(v.norm() - 1.0) > 1e-8)
      fail(ErrorCode::PriorInvalid, "direction v must be a unit vector when alpha > 0");
    if (alpha >= 1.0) fail(ErrorCode::PriorInvalid, "alpha < 1 required for positivity on the sphere");
  }
  LinearPrior p;
  p.v = v;
  p.alpha = alpha;
  p.beta = 1.0;
  return p;
}

double prior_density(const LinearPrior& prior, const orbits::OrbitPoint& phi) {
  const MatrixXd& m = phi.real();
  const Eigen::Map<const VectorXd> flat(m.data(), m.size());
  if (prior.v.size() != flat.size())
    fail(ErrorCode::ShapeMismatch, "prior_density: v does not match the orbit's ambient space");
  const double val = prior.alpha * prior.v.dot(flat) + prior.beta;
  if (val <= 0.0) fail(ErrorCode::NonPositiveDensity, "prior density is not positive at this point");
  return val;
}

EstimatorResult bayes_estimate_s2(const Vector3d& x, const LinearPrior& prior, double epsilon) {
  if (epsilon <= 0.0) fail(ErrorCode::DomainError, "epsilon must be > 0");
  const double norm = x.norm();
  if (norm <= 1e-12) fail(ErrorCode::OutsideTube, "Sphere: zero vector");
  const Vector3d that = x / norm;
  if (prior.alpha > 0.0 && prior.v.size() != 3)
    fail(ErrorCode::PriorInvalid, "bayes_estimate_s2: prior direction must live in E^3");
  const Vector3d v = prior.v.size() == 3 ? Vector3d(prior.v) : Vector3d::Zero();
  const Vector3d vbar = v - v.dot(that) * that;           // d_that pi (v)
  const double lam = prior.alpha * v.dot(that) + prior.beta;
  const double s = prior.alpha * epsilon * epsilon / lam;  // thm step scale
  const Vector3d step = s * vbar;
  orbits::OrbitSpec spec = orbits::OrbitSpec::sphere(3);
  EstimatorResult out;
  out.base_point = {spec, MatrixXd(that)};
  out.estimate = {spec, MatrixXd(sphere::s2_exp(that, step))};
  out.geodesic_step = step;
  out.epsilon = epsilon;
  out.step_length = step.norm();
  return out;
}

double vtilde_dot_tau(double alpha) {
  if (alpha < 0.0 || alpha >= 1.0) fail(ErrorCode::DomainError, "vtilde_dot_tau: alpha in [0,1) required");
  if (alpha < 1e-5) {
    // series 2 alpha / 3 + 2 alpha^3 / 15 + ...
    return 2.0 * alpha / 3.0 + 2.0 * alpha * alpha * alpha / 15.0;
  }
  return (1.0 / (alpha * alpha) - 1.0) * std::log(std::sqrt((1.0 - alpha) / (1.0 + alpha))) +
         1.0 / alpha;
}

double vtilde_dot_tau_quadrature(double alpha, int order) {
  if (alpha < 0.0 || alpha >= 1.0) fail(ErrorCode::DomainError, "alpha in [0,1) required");
  auto rule = sphere::quad_s2(order);
  const Vector3d pole(0, 0, 1);
  double acc = 0.0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    const double c = rule.nodes[i].dot(pole);
    acc += rule.weights[i] * std::log(1.0 + alpha * c) * c;
  }
  return 2.0 * acc;
}

RiskExpansion bayes_risk_s2(const LinearPrior& prior, double /*epsilon*/) {
  return {2.0, 2.0 / 3.0 + vtilde_dot_tau(prior.alpha)};
}

EstimatorResult bayes_estimate_orbit(const orbits::OrbitSpec& spec, const MatrixXd& x,
                                     const LinearPrior& prior, double epsilon) {
  if (epsilon <= 0.0) fail(ErrorCode::DomainError, "epsilon must be > 0");
  if (spec.kind == orbits::OrbitKind::Sphere) {
    orbits::OrbitPoint that = orbits::project(spec, x);
    VectorXd t = that.real();
    VectorXd v = prior.v;
    if (v.size() != t.size()) fail(ErrorCode::PriorInvalid, "prior direction has wrong dimension");
    if (prior.alpha > 0.0 && std::abs(v.norm() - 1.0) > 1e-8)
      fail(ErrorCode::PriorInvalid, "unit direction required");
    const VectorXd vbar = v - v.dot(t) * t;
    const double lam = prior.alpha * v.dot(t) + prior.beta;
    if (lam <= 0.0) fail(ErrorCode::PriorInvalid, "density not positive at the projection");
    const double s = prior.alpha * epsilon * epsilon / lam;
    const VectorXd step = s * vbar;
    const double len = step.norm();
    VectorXd est = t;
    if (len > 1e-300) est = std::cos(len) * t + std::sin(len) * (step / len);
    EstimatorResult out;
    out.base_point = that;
    out.estimate = {spec, MatrixXd(est)};
    out.geodesic_step = step;
    out.epsilon = epsilon;
    out.step_length = len;
    return out;
  }
  if (spec.kind == orbits::OrbitKind::CompactGroup && spec.n == 3) {
    orbits::OrbitPoint that = orbits::project(spec, x);
    const MatrixXd t = that.real();
    if (prior.v.size() != 9) fail(ErrorCode::PriorInvalid, "prior direction must be a 3x3 matrix (flattened)");
    const Eigen::Map<const MatrixXd> v(prior.v.data(), 3, 3);
    // positivity of alpha <v, g> + beta over SO(3):
    // min_g tr(v' g) = -sigma_1 - sigma_2 + sign(det v) sigma_3
    md::SvdDecomp sv = md::svd(v);
    const double sgn = v.determinant() >= 0 ? 1.0 : -1.0;
    const double fmin = -sv.sigma(0) - sv.sigma(1) + sgn * sv.sigma(2);
    if (prior.alpha * fmin + prior.beta <= 0.0)
      fail(ErrorCode::PriorInvalid, "density not positive on SO(3)");
    const double lam = prior.alpha * (v.transpose() * t).trace() + prior.beta;
    // xi . that = d_that pi (v): tangential part of v, i.e. xi = skew(v that')
    const MatrixXd xi = 0.5 * (v * t.transpose() - t * v.transpose());
    const double s = prior.alpha * epsilon * epsilon / lam;
    const Eigen::Vector3d w(s * xi(2, 1), s * xi(0, 2), s * xi(1, 0));
    EstimatorResult out;
    out.base_point = that;
    out.estimate = {spec, MatrixXd(md::so3_exp(w) * t)};
    out.geodesic_step = s * xi * t;
    out.epsilon = epsilon;
    out.step_length = (s * xi * t).norm();
    return out;
  }
  fail(ErrorCode::DomainError,
       "bayes_estimate_orbit: supported orbits are Sphere(n) and CompactGroup(SO(3))");
}

}  // namespace orbitkit::bayes
