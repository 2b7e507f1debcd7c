#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "orbitkit/regression.hpp"
#include "orbitkit/sphere_geom.hpp"

namespace orbitkit::simlab {

enum class DesignPolicy { FixedAcrossDraws, RedrawnPerDraw };

struct SimulationConfig {
  int k = 100;
  int n_draws = 1000;
  std::vector<double> sigma_grid;
  Eigen::Matrix3d true_gamma = default_true_gamma();
  std::uint64_t master_seed = 20260811ULL;
  DesignPolicy design_policy = DesignPolicy::FixedAcrossDraws;
  int threads = 1;

  /// A generic rotation well away from the Euler-chart singularities b in {0, pi}.
  static Eigen::Matrix3d default_true_gamma();
  void validate() const;
};

struct SigmaReport {
  double sigma = 0.0;
  std::vector<sphere::EulerAngles> draws;      // fitted Euler angles, one per draw
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  Eigen::Matrix3d covariance = Eigen::Matrix3d::Zero();  // of the wrapped deviations
  Eigen::Matrix3d cholesky = Eigen::Matrix3d::Zero();    // lower C with C C' = covariance
  std::vector<Eigen::Vector3d> whitened;       // xi = C^{-1} (deviation)
  Eigen::Vector3d ks_statistic = Eigen::Vector3d::Zero();
  Eigen::Vector3d ks_pvalue = Eigen::Vector3d::Zero();
  int failure_count = 0;
};

struct SimulationReport {
  SimulationConfig config;
  std::vector<SigmaReport> per_sigma;
};

regression::RegressionDataset generate_draw(const SimulationConfig& config, double sigma,
                                            int draw_index);

SimulationReport run_simulation(const SimulationConfig& config);

/// sup |empirical CDF - Phi| of the samples.
double ks_statistic_normal(std::vector<double> samples);

/// Kolmogorov-Smirnov test against the standard normal; asymptotic p-value
/// from the Kolmogorov distribution at sqrt(n) D. Requires >= 8 samples.
std::pair<double, double> ks_test_normal(const std::vector<double>& samples);

/// Survival function Q(t) = P(K > t) of the Kolmogorov distribution.
double kolmogorov_q(double t);

/// Per-sigma Euler-angle CSVs, a 3 x |sigma_grid| KS p-value summary CSV and
/// one histogram SVG per (sigma, coordinate).
void emit_artifacts(const SimulationReport& report, const std::string& out_dir);

}  // namespace orbitkit::simlab
