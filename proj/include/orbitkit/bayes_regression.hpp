#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

namespace orbitkit::bayes_reg {

/// Posterior density family lambda(gamma | y) = 1 + c tr(gamma' x) over SO(3)
/// with a flat prior; |c| <= 0.3 keeps the density positive (tr in [-1, 3]).
struct PosteriorModel {
  double c = 0.0;
  Eigen::Matrix3d x_statistic = Eigen::Matrix3d::Identity();

  void validate() const;
};

struct TauForm {
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Zero();
};

struct PosteriorMean {
  Eigen::Matrix3d mean = Eigen::Matrix3d::Zero();
  double std_error = 0.0;  // Frobenius-aggregated Monte Carlo standard error
};

struct IntegralCheck {
  double numeric = 0.0;
  double analytic = 0.0;
  double std_error = 0.0;
};

/// gamma_bar = integral of gamma (1 + c tr(gamma' x)) over Haar, by Monte Carlo.
PosteriorMean posterior_mean(const PosteriorModel& model, std::int64_t n_samples,
                             std::uint64_t seed, int threads = 1);

/// tau = integral of theta theta' over S^2 (I/3 for the unit sphere).
TauForm tau_form_s2(int order);

/// Components of the tangential part of (gamma_bar - gamma_hat) tau at
/// gamma_hat along the supplied tangent basis; norm ~ 0 certifies the
/// first-order condition of the posterior-mean regressor.
double bayes_estimator_condition(const Eigen::Matrix3d& gamma_hat, const Eigen::Matrix3d& gamma_bar,
                                 const TauForm& tau, const std::vector<Eigen::MatrixXd>& tangent_basis);

/// tau(gamma_hat) = 3 iint lambda(gamma_hat gamma | y) (alpha/sin alpha) gamma theta theta'
/// by product quadrature; its skew part vanishes at the Bayesian estimator.
Eigen::Matrix3d weighted_tau(const Eigen::Matrix3d& gamma_hat, const PosteriorModel& model,
                             int order, bool unit_weight = false);

/// Monte Carlo evaluation of the 6-dimensional first-order integral for the
/// worked posterior family, against its closed form pi^4 c^2 sin(y)^2 / 256.
IntegralCheck verify_posterior_integral(const PosteriorModel& model, const Eigen::Matrix3d& gamma_hat,
                                        const Eigen::Matrix3d& alpha_test, std::int64_t n_samples,
                                        std::uint64_t seed, int threads = 1);

}  // namespace orbitkit::bayes_reg
