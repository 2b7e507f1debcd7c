#include <doctest.h>

#include <cmath>
#include <random>

#include "orbitkit/errors.hpp"
#include "orbitkit/matdecomp.hpp"
#include "orbitkit/orbits.hpp"
#include "orbitkit/rng.hpp"

using namespace orbitkit;
using namespace orbitkit::orbits;
namespace md = orbitkit::matdecomp;
using Eigen::MatrixXcd;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

MatrixXd gaussian(int r, int c, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  MatrixXd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = nd(rng);
  return m;
}

MatrixXcd gaussian_c(int r, int c, Rng& rng) {
  std::normal_distribution<double> nd(0.0, 1.0);
  MatrixXcd m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = std::complex<double>(nd(rng), nd(rng));
  return m;
}

/// Random ambient point of the shape the spec demands; not necessarily in tube.
OrbitValue random_ambient(const OrbitSpec& spec, Rng& rng) {
  switch (spec.kind) {
    case OrbitKind::Sphere:
      return MatrixXd(gaussian(spec.n, 1, rng));
    case OrbitKind::Stiefel:
      return MatrixXd(gaussian(spec.n, spec.k, rng));
    case OrbitKind::Grassmannian: {
      MatrixXd a = gaussian(spec.n, spec.n, rng);
      return MatrixXd(0.5 * (a + a.transpose()));
    }
    case OrbitKind::SvdOrbit:
      return MatrixXd(gaussian(spec.rows, spec.cols, rng));
    case OrbitKind::LagrangianGrassmannian:
    case OrbitKind::IsotropicGrassmannian: {
      MatrixXcd a = gaussian_c(spec.n, spec.n, rng);
      return MatrixXcd(0.5 * (a + a.transpose()));
    }
    case OrbitKind::ComplexStructures: {
      MatrixXd a = gaussian(spec.n, spec.n, rng);
      return MatrixXd(0.5 * (a - a.transpose()));
    }
    case OrbitKind::CompactGroup:
      return MatrixXd(gaussian(spec.n, spec.n, rng));
  }
  throw std::logic_error("unreachable");
}

OrbitValue random_in_tube(const OrbitSpec& spec, Rng& rng) {
  for (int t = 0; t < 200; ++t) {
    OrbitValue v = random_ambient(spec, rng);
    if (in_tube(spec, v).inside) return v;
  }
  throw std::logic_error("no in-tube sample found");
}

double diff_norm(const OrbitSpec& spec, const OrbitValue& a, const OrbitValue& b) {
  if (spec.is_complex()) return (std::get<MatrixXcd>(a) - std::get<MatrixXcd>(b)).norm();
  return (std::get<MatrixXd>(a) - std::get<MatrixXd>(b)).norm();
}

std::vector<OrbitSpec> catalogue() {
  return {OrbitSpec::sphere(3),
          OrbitSpec::stiefel(2, 4),
          OrbitSpec::grassmannian(2, 5),
          OrbitSpec::svd_orbit((VectorXd(3) << 2.0, 1.0, 0.5).finished(), 3, 4),
          OrbitSpec::lagrangian(3),
          OrbitSpec::isotropic(2, 4),
          OrbitSpec::complex_structures(6),
          OrbitSpec::special_orthogonal(3)};
}

}  // namespace

TEST_CASE("sphere examples") {
  auto spec = OrbitSpec::sphere(3);
  MatrixXd x(3, 1);
  x << 0, 0, 2.5;
  auto p = project(spec, OrbitValue(x));
  CHECK((p.real() - (MatrixXd(3, 1) << 0, 0, 1).finished()).norm() < 1e-15);
  CHECK_FALSE(in_tube(spec, OrbitValue(MatrixXd(MatrixXd::Zero(3, 1)))).inside);
  CHECK_THROWS_WITH_AS(project(spec, OrbitValue(MatrixXd(MatrixXd::Zero(3, 1)))),
                       doctest::Contains("OutsideTube"), Error);
}

TEST_CASE("stiefel k=1 coincides with the sphere projection") {
  Rng rng = make_rng(31, {0});
  auto st = OrbitSpec::stiefel(1, 5);
  auto sp = OrbitSpec::sphere(5);
  for (int t = 0; t < 20; ++t) {
    MatrixXd x = gaussian(5, 1, rng);
    if (x.norm() < 1e-6) continue;
    CHECK(diff_norm(st, project(st, OrbitValue(x)).value, project(sp, OrbitValue(x)).value) < 1e-12);
  }
}

TEST_CASE("stiefel general base projection x (x'x)^{-1/2} tau") {
  Rng rng = make_rng(31, {1});
  MatrixXd theta = gaussian(5, 2, rng);  // full rank base frame
  for (int t = 0; t < 20; ++t) {
    MatrixXd x = gaussian(5, 2, rng);
    MatrixXd p = stiefel_project_to_base(x, theta);
    MatrixXd tau = md::sym_sqrt(theta.transpose() * theta);
    MatrixXd oracle = x * md::sym_sqrt(x.transpose() * x).inverse() * tau;
    CHECK((p - oracle).norm() < 1e-9);
    // fixes the base
    CHECK((stiefel_project_to_base(theta, theta) - theta).norm() < 1e-9);
  }
}

TEST_CASE("grassmannian diag example and gap rejection") {
  auto spec = OrbitSpec::grassmannian(1, 2);
  MatrixXd x = Eigen::Vector2d(3.0, 1.0).asDiagonal();
  auto p = project(spec, OrbitValue(x));
  CHECK((p.real() - Eigen::Vector2d(1.0, 0.0).asDiagonal().toDenseMatrix()).norm() < 1e-12);
  MatrixXd tie = Eigen::Vector2d(1.0, 1.0).asDiagonal();
  CHECK_FALSE(in_tube(spec, OrbitValue(tie)).inside);
}

TEST_CASE("grassmannian(1,2) nearest point vs parametrized projector family") {
  Rng rng = make_rng(31, {2});
  auto spec = OrbitSpec::grassmannian(1, 2);
  for (int t = 0; t < 10; ++t) {
    OrbitValue x = random_in_tube(spec, rng);
    const MatrixXd& xm = std::get<MatrixXd>(x);
    const MatrixXd px = project(spec, x).real();
    double best = 1e300;
    for (int i = 0; i < 20000; ++i) {
      const double th = 3.14159265358979 * i / 20000.0;
      MatrixXd p(2, 2);
      p << std::cos(th) * std::cos(th), std::cos(th) * std::sin(th), std::cos(th) * std::sin(th),
          std::sin(th) * std::sin(th);
      best = std::min(best, (xm - p).norm());
    }
    CHECK((xm - px).norm() <= best + 1e-6);
  }
}

TEST_CASE("compact group agrees with project_special_orthogonal") {
  Rng rng = make_rng(31, {3});
  auto spec = OrbitSpec::special_orthogonal(3);
  for (int t = 0; t < 20; ++t) {
    MatrixXd x = gaussian(3, 3, rng);
    if (!in_tube(spec, OrbitValue(x)).inside) continue;
    CHECK((project(spec, OrbitValue(x)).real() - md::project_special_orthogonal(x)).norm() < 1e-12);
  }
}

TEST_CASE("svd orbit: base collisions allowed in x exactly where the base collides") {
  // base (1, 1, 0): x may collide in the top pair, must separate at the 2|3 boundary
  auto spec = OrbitSpec::svd_orbit((VectorXd(3) << 1.0, 1.0, 0.0).finished(), 3, 4);
  Rng rng = make_rng(31, {4});
  MatrixXd u = md::svd(gaussian(3, 3, rng)).u;
  MatrixXd v = md::svd(gaussian(4, 4, rng)).u;
  MatrixXd d = MatrixXd::Zero(3, 4);
  d(0, 0) = 2.0, d(1, 1) = 2.0, d(2, 2) = 0.5;  // collision where base collides: fine
  CHECK(in_tube(spec, OrbitValue(MatrixXd(u * d * v.transpose()))).inside);
  d(1, 1) = 0.5;  // now collides at the base's gap boundary
  CHECK_FALSE(in_tube(spec, OrbitValue(MatrixXd(u * d * v.transpose()))).inside);
}

TEST_CASE("lagrangian tube demands nonsingular; complex structures demand right component") {
  auto lg = OrbitSpec::lagrangian(3);
  MatrixXcd z = MatrixXcd::Zero(3, 3);
  z(0, 0) = 1.0;
  z(1, 1) = 1.0;
  CHECK_FALSE(in_tube(lg, OrbitValue(z)).inside);

  auto cs = OrbitSpec::complex_structures(4);
  const MatrixXd theta = std::get<MatrixXd>(base_point(cs));
  CHECK(in_tube(cs, OrbitValue(theta)).inside);
  // flipping one block lands in the other SO(4)-component
  MatrixXd flipped = theta;
  flipped(0, 1) = 1.0;
  flipped(1, 0) = -1.0;
  auto chk = in_tube(cs, OrbitValue(flipped));
  CHECK_FALSE(chk.inside);
  CHECK(chk.diagnostic.find("component") != std::string::npos);
}

TEST_CASE("base points lie on their orbits and project to themselves") {
  Rng rng = make_rng(31, {5});
  for (const auto& spec : catalogue()) {
    OrbitValue bp = base_point(spec);
    CHECK(on_orbit(spec, bp));
    CHECK(diff_norm(spec, project(spec, bp).value, bp) < 1e-9);
    (void)rng;
  }
}

TEST_CASE("idempotence, fixity, equivariance and orbit membership for all kinds") {
  for (const auto& spec : catalogue()) {
    CAPTURE(to_string(spec.kind));
    Rng rng = make_rng(31, {6, static_cast<std::uint64_t>(spec.kind)});
    for (int t = 0; t < 60; ++t) {
      OrbitValue x = random_in_tube(spec, rng);
      OrbitPoint p = project(spec, x);
      CHECK(on_orbit(spec, p.value));
      // idempotence
      CHECK(diff_norm(spec, project(spec, p.value).value, p.value) < 1e-9);
      // fixity on a fresh orbit sample
      GroupElement h = random_group_element(spec, rng);
      OrbitValue y = act(spec, h, base_point(spec));
      CHECK(diff_norm(spec, project(spec, y).value, y) < 1e-9);
      // equivariance
      GroupElement g = random_group_element(spec, rng);
      CHECK(equivariance_check(spec, x, g) < 1e-8);
    }
  }
}

TEST_CASE("sphere equivariance is exact to 1e-12 under rotations") {
  auto spec = OrbitSpec::sphere(3);
  Rng rng = make_rng(31, {7});
  for (int t = 0; t < 50; ++t) {
    OrbitValue x = random_in_tube(spec, rng);
    GroupElement g = random_group_element(spec, rng);
    CHECK(equivariance_check(spec, x, g) < 1e-12);
  }
}

TEST_CASE("nearest-point spot check against randomized orbit search") {
  Rng rng = make_rng(31, {8});
  std::vector<OrbitSpec> specs = {OrbitSpec::sphere(3), OrbitSpec::stiefel(2, 4),
                                  OrbitSpec::special_orthogonal(3), OrbitSpec::grassmannian(1, 2)};
  for (const auto& spec : specs) {
    CAPTURE(to_string(spec.kind));
    OrbitValue x = random_in_tube(spec, rng);
    const double dproj = diff_norm(spec, x, project(spec, x).value);
    double best = 1e300;
    OrbitValue bp = base_point(spec);
    for (int i = 0; i < 10000; ++i) {
      GroupElement g = random_group_element(spec, rng);
      best = std::min(best, diff_norm(spec, x, act(spec, g, bp)));
    }
    CHECK(dproj <= best + 1e-6);
  }
}

TEST_CASE("low_rank_project: fixed point, truncation, Eckart-Young oracle") {
  Rng rng = make_rng(31, {9});
  MatrixXd d = Eigen::Vector3d(3.0, 2.0, 1.0).asDiagonal();
  CHECK((low_rank_project(d, 1) - MatrixXd(Eigen::Vector3d(3.0, 0.0, 0.0).asDiagonal())).norm() <
        1e-12);
  for (int t = 0; t < 20; ++t) {
    MatrixXd x = gaussian(4, 3, rng);
    MatrixXd lr = low_rank_project(x, 2);
    // rank-l fixed point
    CHECK((low_rank_project(lr, 2) - lr).norm() < 1e-9);
    // Eckart-Young: residual equals the tail singular values
    auto sv = md::svd(x);
    CHECK((x - lr).norm() == doctest::Approx(sv.sigma(2)).epsilon(1e-9));
    // beats random rank-2 candidates
    for (int i = 0; i < 200; ++i) {
      MatrixXd cand = gaussian(4, 2, rng) * gaussian(2, 3, rng);
      CHECK((x - lr).norm() <= (x - cand).norm() + 1e-9);
    }
  }
  MatrixXd tie = Eigen::Vector3d(2.0, 2.0, 1.0).asDiagonal();
  CHECK_THROWS_WITH_AS(low_rank_project(tie, 1), doctest::Contains("RankGapViolation"), Error);
}

TEST_CASE("shape mismatches raise ShapeMismatch") {
  CHECK_THROWS_WITH_AS(in_tube(OrbitSpec::stiefel(2, 4), OrbitValue(MatrixXd(MatrixXd::Zero(3, 3)))),
                       doctest::Contains("ShapeMismatch"), Error);
  MatrixXd nonsym = (MatrixXd(2, 2) << 1, 2, 0, 1).finished();
  CHECK_THROWS_WITH_AS(in_tube(OrbitSpec::grassmannian(1, 2), OrbitValue(nonsym)),
                       doctest::Contains("ShapeMismatch"), Error);
}
