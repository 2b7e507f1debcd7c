#pragma once

#include <Eigen/Dense>
#include <vector>

#include "orbitkit/rng.hpp"

namespace orbitkit::sphere {

using UnitVector = Eigen::Vector3d;
using Rotation = Eigen::Matrix3d;

inline constexpr double kCutLocusTol = 1e-9;  // on <x,y> + 1
inline constexpr double kTangentTol = 1e-10;

struct EulerAngles {
  double a = 0.0;  // [0, 2pi)
  double b = 0.0;  // [0, pi]
  double c = 0.0;  // [0, 2pi)
  bool gimbal_lock = false;
};

/// Nodes and weights for an invariant-measure integral; weights sum to 1.
template <typename Node>
struct QuadratureRule {
  std::vector<Node> nodes;
  std::vector<double> weights;
  int exactness_degree = 0;
};

bool is_unit(const UnitVector& x, double tol = 1e-12);
bool is_rotation(const Rotation& r, double tol = 1e-10);

/// Counterclockwise rotation by s radians in the plane orthogonal to axis j (1-based).
Rotation elementary_rotation(int j, double s);

double s2_dist(const UnitVector& x, const UnitVector& y);
Eigen::Vector3d s2_log(const UnitVector& x, const UnitVector& y);
UnitVector s2_exp(const UnitVector& x, const Eigen::Vector3d& w);

EulerAngles euler_from_rotation(const Rotation& r);
Rotation rotation_from_euler(const EulerAngles& e);
inline Rotation rotation_from_euler(double a, double b, double c) {
  return rotation_from_euler(EulerAngles{a, b, c, false});
}

UnitVector sample_uniform_s2(Rng& rng);
Rotation sample_haar_so3(Rng& rng);

QuadratureRule<UnitVector> quad_s2(int order);
QuadratureRule<Rotation> quad_so3(int order);

}  // namespace orbitkit::sphere
