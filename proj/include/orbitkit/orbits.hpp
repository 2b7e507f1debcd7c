#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>

#include "orbitkit/rng.hpp"

namespace orbitkit::orbits {

enum class OrbitKind {
  Sphere,                  // S^{n-1} in E^n, O(n) acting by left multiplication
  Stiefel,                 // orthonormal k-frames, n x k, O(n) by left multiplication
  Grassmannian,            // rank-k orthogonal projectors in Sym(E^n), O(n) by congruence
  SvdOrbit,                // n x k matrices, O(n) x O(k) by g1 x g2'
  LagrangianGrassmannian,  // {g g' : g in U(n)} in Sym(C^n), U(n) by congruence
  IsotropicGrassmannian,   // {g theta g' : g in U(n)}, theta = diag(I_k, 0)
  ComplexStructures,       // SO(2n)-conjugacy orbit of the standard J in so(2n)
  CompactGroup,            // SO(n) itself in Hom(E^n, E^n), left multiplication
};

const char* to_string(OrbitKind k);

/// Tagged description of one concrete orbit.
struct OrbitSpec {
  OrbitKind kind;
  int k = 0;  // frame / plane dimension where applicable
  int n = 0;  // ambient dimension parameter (matrix size; 2n for ComplexStructures)
  Eigen::VectorXd base_sigma;  // SvdOrbit only: descending nonnegative base singular values
  int rows = 0, cols = 0;      // SvdOrbit only: base shape

  static OrbitSpec sphere(int n);
  static OrbitSpec stiefel(int k, int n);
  static OrbitSpec grassmannian(int k, int n);
  static OrbitSpec svd_orbit(const Eigen::VectorXd& base_sigma, int rows, int cols);
  static OrbitSpec lagrangian(int n);
  static OrbitSpec isotropic(int k, int n);
  static OrbitSpec complex_structures(int two_n);
  static OrbitSpec special_orthogonal(int n);

  bool is_complex() const {
    return kind == OrbitKind::LagrangianGrassmannian || kind == OrbitKind::IsotropicGrassmannian;
  }
};

using OrbitValue = std::variant<Eigen::MatrixXd, Eigen::MatrixXcd>;

struct OrbitPoint {
  OrbitSpec spec;
  OrbitValue value;

  const Eigen::MatrixXd& real() const { return std::get<Eigen::MatrixXd>(value); }
  const Eigen::MatrixXcd& complex() const { return std::get<Eigen::MatrixXcd>(value); }
};

struct TubeCheck {
  bool inside = false;
  std::string diagnostic;  // which gap/rank condition failed
};

/// Group element acting on the ambient space of one orbit kind. SvdOrbit uses
/// the pair (left, right); every other kind uses `left` alone.
struct GroupElement {
  Eigen::MatrixXcd left;
  Eigen::MatrixXcd right;  // SvdOrbit only
};

inline constexpr double kGapTol = 1e-8;     // times scale of x
inline constexpr double kOnOrbitTol = 1e-8;

TubeCheck in_tube(const OrbitSpec& spec, const OrbitValue& x);
OrbitPoint project(const OrbitSpec& spec, const OrbitValue& x);

/// || pi(g.x) - g.pi(x) ||_F  for x in the tube.
double equivariance_check(const OrbitSpec& spec, const OrbitValue& x, const GroupElement& g);

bool on_orbit(const OrbitSpec& spec, const OrbitValue& v, double tol = kOnOrbitTol);

OrbitValue base_point(const OrbitSpec& spec);
GroupElement random_group_element(const OrbitSpec& spec, Rng& rng);
OrbitValue act(const OrbitSpec& spec, const GroupElement& g, const OrbitValue& x);

/// Remark-style low-rank approximation: zero the singular values past l.
Eigen::MatrixXd low_rank_project(const Eigen::MatrixXd& x, int l);

/// Projection x (x'x)^{-1/2} tau onto the left-O(n) orbit of a full-rank
/// base frame theta, tau = (theta' theta)^{1/2}.
Eigen::MatrixXd stiefel_project_to_base(const Eigen::MatrixXd& x, const Eigen::MatrixXd& theta);

}  // namespace orbitkit::orbits
