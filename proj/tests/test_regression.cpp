#include <doctest.h>

#include <cmath>

#include "orbitkit/errors.hpp"
#include "orbitkit/matdecomp.hpp"
#include "orbitkit/regression.hpp"
#include "orbitkit/rng.hpp"
#include "orbitkit/sphere_geom.hpp"

using namespace orbitkit;
using namespace orbitkit::regression;
namespace md = orbitkit::matdecomp;
using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;

namespace {

RegressionDataset make_data(const Matrix3d& gamma, int k, double sigma, Rng& rng) {
  RegressionDataset d;
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int l = 0; l < k; ++l) {
    Vector3d th = sphere::sample_uniform_s2(rng);
    Vector3d u = gamma * th + sigma * Vector3d(nd(rng), nd(rng), nd(rng));
    if (u.norm() < 1e-9) {
      --l;
      continue;
    }
    d.design.push_back(th);
    d.observations.push_back(u.normalized());
  }
  return d;
}

double geodesic_gap(const Matrix3d& a, const Matrix3d& b) {
  return md::so3_log(Matrix3d(a.transpose() * b)).norm();
}

}  // namespace

TEST_CASE("lsq_linear: trivial normal space reduces to the normal equations") {
  Rng rng = make_rng(51, {0});
  RegressionDataset d = make_data(Matrix3d::Identity(), 12, 0.4, rng);
  // full tangent basis of Hom(E^3, E^3)
  std::vector<MatrixXd> basis;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      MatrixXd e = MatrixXd::Zero(3, 3);
      e(i, j) = 1.0;
      basis.push_back(e);
    }
  MatrixXd nu = MatrixXd::Zero(3, 3), tau = MatrixXd::Zero(3, 3);
  for (size_t l = 0; l < d.k(); ++l) {
    nu += d.observations[l] * d.design[l].transpose();
    tau += d.design[l] * d.design[l].transpose();
  }
  MatrixXd gamma_star = nu * tau.inverse();
  CHECK(lsq_linear(d, gamma_star, basis).norm() < 1e-10);
  CHECK(lsq_linear(d, MatrixXd(Matrix3d::Identity()), basis).norm() > 1e-3);
}

TEST_CASE("lsq_linear: residual zero on noiseless data at the true map") {
  Rng rng = make_rng(51, {1});
  Matrix3d g0 = sphere::sample_haar_so3(rng);
  RegressionDataset d = make_data(g0, 15, 0.0, rng);
  std::vector<MatrixXd> basis;
  for (const auto& e : {Vector3d(1, 0, 0), Vector3d(0, 1, 0), Vector3d(0, 0, 1)})
    basis.push_back(MatrixXd(md::so3_hat(e) * g0));
  CHECK(lsq_linear(d, MatrixXd(g0), basis).norm() < 1e-12);
}

TEST_CASE("lsq_linear equals the finite-difference directional derivative") {
  Rng rng = make_rng(51, {2});
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int t = 0; t < 100; ++t) {
    RegressionDataset d = make_data(sphere::sample_haar_so3(rng), 8, 0.5, rng);
    MatrixXd gamma(3, 3), e(3, 3);
    for (int i = 0; i < 9; ++i) gamma(i / 3, i % 3) = nd(rng);
    for (int i = 0; i < 9; ++i) e(i / 3, i % 3) = nd(rng);
    const double coeff = lsq_linear(d, gamma, {e})(0);
    // central difference of (1/k) sum |y_l - (gamma + t e) theta_l|^2:
    // derivative = -(2/k) <nu - gamma tau, e>
    const double h = 1e-6;
    auto ssq = [&](const MatrixXd& g) {
      double acc = 0.0;
      for (size_t l = 0; l < d.k(); ++l)
        acc += (d.observations[l] - g * d.design[l]).squaredNorm();
      return acc / static_cast<double>(d.k());
    };
    const double deriv = (ssq(gamma + h * e) - ssq(gamma - h * e)) / (2 * h);
    CHECK(coeff == doctest::Approx(-0.5 * static_cast<double>(d.k()) * deriv).epsilon(1e-7));
  }
}

TEST_CASE("fit_extrinsic_so3: exact recovery, order independence, FOC") {
  Rng rng = make_rng(51, {3});
  for (int t = 0; t < 25; ++t) {
    Matrix3d g0 = sphere::sample_haar_so3(rng);
    RegressionDataset d = make_data(g0, 10, 0.0, rng);
    auto fit = fit_extrinsic_so3(d);
    CHECK((fit.gamma - g0).norm() < 1e-10);
    CHECK(fit.iterations == 0);

    RegressionDataset rev = d;
    std::reverse(rev.design.begin(), rev.design.end());
    std::reverse(rev.observations.begin(), rev.observations.end());
    CHECK((fit_extrinsic_so3(rev).gamma - fit.gamma).norm() < 1e-12);

    RegressionDataset noisy = make_data(g0, 40, 0.3, rng);
    auto nf = fit_extrinsic_so3(noisy);
    Matrix3d nu = Matrix3d::Zero();
    for (size_t l = 0; l < noisy.k(); ++l)
      nu += noisy.observations[l] * noisy.design[l].transpose();
    Matrix3d tt = nf.gamma.transpose() * nu;
    CHECK((tt - tt.transpose()).norm() < 1e-9);
  }
}

TEST_CASE("fit_extrinsic_so3: Monte Carlo consistency at sigma = 0.3") {
  Rng rng = make_rng(51, {4});
  Matrix3d g0 = sphere::sample_haar_so3(rng);
  std::vector<double> errs;
  for (int s = 0; s < 200; ++s) {
    RegressionDataset d = make_data(g0, 100, 0.3, rng);
    errs.push_back(geodesic_gap(fit_extrinsic_so3(d).gamma, g0));
  }
  std::sort(errs.begin(), errs.end());
  CHECK(errs[errs.size() / 2] < 0.1);  // median ~ O(sigma / sqrt k)
}

TEST_CASE("degenerate designs are rejected") {
  RegressionDataset tiny;
  tiny.design = {Vector3d(1, 0, 0), Vector3d(0, 1, 0)};
  tiny.observations = tiny.design;
  CHECK_THROWS_WITH_AS(fit_extrinsic_so3(tiny), doctest::Contains("k >= 3"), Error);

  RegressionDataset flat;  // all design on one axis: rank-1 tau
  for (int i = 0; i < 5; ++i) {
    flat.design.push_back(Vector3d(0, 0, i % 2 ? 1 : -1));
    flat.observations.push_back(Vector3d(0, 0, 1));
  }
  CHECK_THROWS_WITH_AS(fit_extrinsic_so3(flat), doctest::Contains("DegenerateProjection"), Error);
}

TEST_CASE("fit_intrinsic_so3: noiseless recovery and FOC at the solution") {
  Rng rng = make_rng(51, {5});
  for (int t = 0; t < 15; ++t) {
    Matrix3d g0 = sphere::sample_haar_so3(rng);
    RegressionDataset d = make_data(g0, 12, 0.0, rng);
    auto fit = fit_intrinsic_so3(d);
    CHECK(fit.converged);
    CHECK((fit.gamma - g0).norm() < 1e-10);
    CHECK(fit.residual_norm < 1e-10);
    CHECK(fit.antipodal_pairs.empty());
  }
}

TEST_CASE("fit_intrinsic_so3: intrinsic-extrinsic gap decays quadratically in sigma") {
  Rng rng = make_rng(51, {6});
  Matrix3d g0 = sphere::sample_haar_so3(rng);
  const int reps = 60;
  double gap[3] = {0, 0, 0};
  const double sigmas[3] = {0.05, 0.1, 0.2};
  for (int si = 0; si < 3; ++si) {
    for (int r = 0; r < reps; ++r) {
      RegressionDataset d = make_data(g0, 60, sigmas[si], rng);
      auto fi = fit_intrinsic_so3(d);
      auto fe = fit_extrinsic_so3(d);
      gap[si] += (fi.gamma - fe.gamma).norm() / reps;
    }
  }
  // The gap vanishes at least quadratically (a doubling of sigma may not
  // shrink it by less than 4/2 = 2x); the measured decay is in fact closer to
  // cubic, which satisfies the O(sigma^2) bound a fortiori.
  CHECK(gap[1] / gap[0] > 2.0);
  CHECK(gap[2] / gap[1] > 2.0);
  for (int si = 0; si < 3; ++si) CHECK(gap[si] <= sigmas[si] * sigmas[si]);
}

TEST_CASE("fit_intrinsic_so3: converged fit is a local minimum") {
  Rng rng = make_rng(51, {7});
  RegressionDataset d = make_data(sphere::sample_haar_so3(rng), 40, 0.4, rng);
  auto fit = fit_intrinsic_so3(d);
  const double f0 = sum_sq_intrinsic(d, fit.gamma);
  std::normal_distribution<double> nd(0.0, 1.0);
  for (int i = 0; i < 100; ++i) {
    Vector3d w(nd(rng), nd(rng), nd(rng));
    w = 1e-3 * w.normalized();
    CHECK(sum_sq_intrinsic(d, Matrix3d(md::so3_exp(w) * fit.gamma)) > f0);
  }
}

TEST_CASE("equivariance of both fits") {
  Rng rng = make_rng(51, {8});
  for (int t = 0; t < 10; ++t) {
    RegressionDataset d = make_data(sphere::sample_haar_so3(rng), 30, 0.3, rng);
    Matrix3d g = sphere::sample_haar_so3(rng), h = sphere::sample_haar_so3(rng);
    RegressionDataset moved;
    for (size_t l = 0; l < d.k(); ++l) {
      moved.design.push_back(g * d.design[l]);
      moved.observations.push_back(h * d.observations[l]);
    }
    CHECK((fit_extrinsic_so3(moved).gamma - h * fit_extrinsic_so3(d).gamma * g.transpose()).norm() <
          1e-8);
    CHECK((fit_intrinsic_so3(moved).gamma - h * fit_intrinsic_so3(d).gamma * g.transpose()).norm() <
          1e-8);
  }
}

TEST_CASE("sum of squares: zero at perfect fit, hand values, chord <= arc") {
  Rng rng = make_rng(51, {9});
  Matrix3d g0 = sphere::sample_haar_so3(rng);
  RegressionDataset d = make_data(g0, 8, 0.0, rng);
  CHECK(sum_sq_intrinsic(d, g0) == doctest::Approx(0.0));
  CHECK(sum_sq_extrinsic(d, g0) == doctest::Approx(0.0));

  // single pair at angle alpha among k pairs
  const double alpha = 0.8;
  RegressionDataset one;
  one.design = {Vector3d(0, 0, 1), Vector3d(1, 0, 0), Vector3d(0, 1, 0)};
  one.observations = {Vector3d(std::sin(alpha), 0, std::cos(alpha)), Vector3d(1, 0, 0),
                      Vector3d(0, 1, 0)};
  const double k = 3.0;
  CHECK(sum_sq_intrinsic(one, Matrix3d::Identity()) == doctest::Approx(alpha * alpha / k));
  CHECK(sum_sq_extrinsic(one, Matrix3d::Identity()) ==
        doctest::Approx(std::pow(2 * std::sin(alpha / 2), 2) / k));

  for (int t = 0; t < 50; ++t) {
    RegressionDataset r = make_data(g0, 10, 0.6, rng);
    Matrix3d q = sphere::sample_haar_so3(rng);
    CHECK(sum_sq_extrinsic(r, q) <= sum_sq_intrinsic(r, q) + 1e-12);
  }
}

TEST_CASE("loss axioms for both losses on random pairs") {
  Rng rng = make_rng(51, {10});
  for (int t = 0; t < 200; ++t) {
    Vector3d x = sphere::sample_uniform_s2(rng), y = sphere::sample_uniform_s2(rng);
    const double li = std::pow(sphere::s2_dist(x, y), 2);
    const double le = (x - y).squaredNorm();
    CHECK(li >= 0.0);
    CHECK(le >= 0.0);
    CHECK(std::abs(li - std::pow(sphere::s2_dist(y, x), 2)) < 1e-12);
    CHECK(std::abs(le - (y - x).squaredNorm()) < 1e-12);
  }
  Vector3d x = sphere::sample_uniform_s2(rng);
  CHECK(std::pow(sphere::s2_dist(x, x), 2) == 0.0);
  CHECK((x - x).squaredNorm() == 0.0);
}
