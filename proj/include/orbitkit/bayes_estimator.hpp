#pragma once

#include <Eigen/Dense>

#include "orbitkit/orbits.hpp"

namespace orbitkit::bayes {

/// Density lambda_v = alpha <v, .> + beta on a group orbit, normalized so it
/// integrates to 1 against the invariant probability measure and stays > 0.
struct LinearPrior {
  Eigen::VectorXd v;
  double alpha = 0.0;
  double beta = 1.0;

  /// Prior on S^{n-1}: the invariant mean of the orbit is 0, so beta = 1;
  /// positivity needs alpha |v| < 1. Flat prior: alpha = 0.
  static LinearPrior for_sphere(const Eigen::VectorXd& v, double alpha);
};

struct EstimatorResult {
  orbits::OrbitPoint estimate;
  orbits::OrbitPoint base_point;      // the projection pi(x)
  Eigen::MatrixXd geodesic_step;      // ambient tangent vector at base_point
  double epsilon = 0.0;
  double step_length = 0.0;           // geodesic length of the second-order correction
};

struct RiskExpansion {
  double order2_coeff = 0.0;
  double order4_coeff = 0.0;
};

/// alpha <v, phi> + beta; must be positive.
double prior_density(const LinearPrior& prior, const orbits::OrbitPoint& phi);

EstimatorResult bayes_estimate_s2(const Eigen::Vector3d& x, const LinearPrior& prior, double epsilon);

/// (alpha^{-2} - 1) log sqrt((1-alpha)/(1+alpha)) + 1/alpha on [0, 1);
/// continuous limit 0 at alpha = 0, limit 1 as alpha -> 1.
double vtilde_dot_tau(double alpha);

/// Quadrature route for the same quantity, used as an independent oracle:
/// 2 * integral over S^2 of log(1 + alpha cos b) cos b against the uniform
/// probability measure (the factor 2 is |tau(iota)| for the unit 2-sphere).
double vtilde_dot_tau_quadrature(double alpha, int order);

RiskExpansion bayes_risk_s2(const LinearPrior& prior, double epsilon);

/// Second-order estimator exp(s xi) pi(x) on Sphere(n) or CompactGroup(SO(3)).
EstimatorResult bayes_estimate_orbit(const orbits::OrbitSpec& spec, const Eigen::MatrixXd& x,
                                     const LinearPrior& prior, double epsilon);

}  // namespace orbitkit::bayes
