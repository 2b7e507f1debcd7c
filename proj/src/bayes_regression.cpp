#include "orbitkit/bayes_regression.hpp"

#include <atomic>
#include <cmath>
#include <thread>

#include "orbitkit/errors.hpp"
#include "orbitkit/rng.hpp"
#include "orbitkit/sphere_geom.hpp"

namespace orbitkit::bayes_reg {

using Eigen::Matrix3d;
using Eigen::MatrixXd;
using Eigen::Vector3d;

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr int kChunks = 64;  // fixed chunk count keeps results independent of --threads

template <typename Work>
void run_chunks(int threads, Work&& work) {
  if (threads <= 1) {
    for (int c = 0; c < kChunks; ++c) work(c);
    return;
  }
  std::vector<std::thread> pool;
  std::atomic<int> next{0};
  for (int t = 0; t < threads; ++t)
    pool.emplace_back([&] {
      for (;;) {
        const int c = next.fetch_add(1);
        if (c >= kChunks) return;
        work(c);
      }
    });
  for (auto& th : pool) th.join();
}

}  // namespace

void PosteriorModel::validate() const {
  if (std::abs(c) > 0.3) fail(ErrorCode::DomainError, "PosteriorModel: |c| <= 0.3 required");
  if (!sphere::is_rotation(x_statistic))
    fail(ErrorCode::DomainError, "PosteriorModel: the statistic must be a rotation");
}

PosteriorMean posterior_mean(const PosteriorModel& model, std::int64_t n_samples,
                             std::uint64_t seed, int threads) {
  model.validate();
  if (n_samples < 10000) fail(ErrorCode::TooFewSamples, "posterior_mean: n_samples >= 1e4");
  std::vector<Matrix3d> sums(kChunks, Matrix3d::Zero());
  std::vector<Matrix3d> sums2(kChunks, Matrix3d::Zero());
  const std::int64_t per = n_samples / kChunks;
  const std::int64_t rem = n_samples % kChunks;
  run_chunks(threads, [&](int c) {
    Rng rng = make_rng(seed, {0xB0A7u, static_cast<std::uint64_t>(c)});
    const std::int64_t m = per + (c < rem ? 1 : 0);
    Matrix3d s = Matrix3d::Zero(), s2 = Matrix3d::Zero();
    for (std::int64_t i = 0; i < m; ++i) {
      const Matrix3d g = sphere::sample_haar_so3(rng);
      const double w = 1.0 + model.c * (g.transpose() * model.x_statistic).trace();
      const Matrix3d v = w * g;
      s += v;
      s2 += v.cwiseProduct(v);
    }
    sums[c] = s;
    sums2[c] = s2;
  });
  Matrix3d total = Matrix3d::Zero(), total2 = Matrix3d::Zero();
  for (int c = 0; c < kChunks; ++c) {  // deterministic reduction order
    total += sums[c];
    total2 += sums2[c];
  }
  PosteriorMean out;
  const double n = static_cast<double>(n_samples);
  out.mean = total / n;
  const Matrix3d var = (total2 / n - out.mean.cwiseProduct(out.mean)).cwiseMax(0.0);
  out.std_error = std::sqrt(var.sum() / n);
  return out;
}

TauForm tau_form_s2(int order) {
  auto rule = sphere::quad_s2(order);
  Matrix3d m = Matrix3d::Zero();
  for (size_t i = 0; i < rule.nodes.size(); ++i)
    m += rule.weights[i] * rule.nodes[i] * rule.nodes[i].transpose();
  return {m};
}

double bayes_estimator_condition(const Matrix3d& gamma_hat, const Matrix3d& gamma_bar,
                                 const TauForm& tau, const std::vector<MatrixXd>& tangent_basis) {
  if (std::abs(tau.matrix.determinant()) < 1e-14)
    fail(ErrorCode::SingularTau, "bayes_estimator_condition: tau is singular");
  const Matrix3d resid = (gamma_bar - gamma_hat) * tau.matrix;
  double acc = 0.0;
  for (const auto& e : tangent_basis) {
    const double comp = (resid.array() * e.array()).sum() / std::max(1.0, e.norm());
    acc += comp * comp;
  }
  return std::sqrt(acc);
}

Matrix3d weighted_tau(const Matrix3d& gamma_hat, const PosteriorModel& model, int order,
                      bool unit_weight) {
  model.validate();
  if (order < 8) fail(ErrorCode::DomainError, "weighted_tau: quadrature order >= 8");
  auto s2 = sphere::quad_s2(order);
  auto so3 = sphere::quad_so3(order);
  const Eigen::Index nt = static_cast<Eigen::Index>(s2.nodes.size());
  Eigen::Matrix3Xd nodes(3, nt);
  Eigen::VectorXd s2w(nt);
  for (Eigen::Index i = 0; i < nt; ++i) {
    nodes.col(i) = s2.nodes[i];
    s2w(i) = s2.weights[i];
  }
  // lambda(gamma_hat gamma | y) = 1 + c tr(gamma' m) with m = gamma_hat' x
  const Matrix3d m = gamma_hat.transpose() * model.x_statistic;
  Matrix3d acc = Matrix3d::Zero();
  Eigen::Matrix3Xd rotated(3, nt);
  Eigen::Matrix3Xd weighted(3, nt);
  Eigen::ArrayXd ca(nt), a(nt), w(nt);
  for (size_t gi = 0; gi < so3.nodes.size(); ++gi) {
    const Matrix3d& g = so3.nodes[gi];
    const double lam = 1.0 + model.c * (g.transpose() * m).trace();
    rotated.noalias() = g * nodes;
    if (unit_weight) {
      w = s2w.array();
    } else {
      ca = (rotated.array() * nodes.array()).colwise().sum().transpose().min(1.0).max(-1.0);
      a = ca.acos();
      w = s2w.array() *
          (a < 1e-6).select(1.0 + a.square() / 6.0, a / (1.0 - ca.square()).max(1e-300).sqrt());
    }
    weighted = rotated.array().rowwise() * w.transpose();
    acc.noalias() += (so3.weights[gi] * lam) * (weighted * nodes.transpose());
  }
  return 3.0 * acc;
}

IntegralCheck verify_posterior_integral(const PosteriorModel& model, const Matrix3d& gamma_hat,
                                        const Matrix3d& alpha_test, std::int64_t n_samples,
                                        std::uint64_t seed, int threads) {
  model.validate();
  if (!sphere::is_rotation(alpha_test) || !sphere::is_rotation(gamma_hat))
    fail(ErrorCode::DomainError, "verify_posterior_integral: rotations required");
  const Matrix3d m = alpha_test.transpose() * gamma_hat.transpose() * model.x_statistic * alpha_test;
  const auto euler = sphere::euler_from_rotation(m);
  IntegralCheck out;
  out.analytic = std::pow(kPi, 4) * model.c * model.c * std::pow(std::sin(euler.b), 2) / 256.0;

  // Integrand (1/64 pi^4) sin b1 sin b2 b1 b2 cos(a1 - a2) lambda_1 lambda_2 over
  // [0,2pi]^4 x [0,pi]^2 with lambda_j = 1 + c tr(gamma_j' m). The "1" and the
  // c-linear parts of lambda_1 lambda_2 have vanishing a2- resp. a1-marginals
  // against cos(a1 - a2), so only the c^2 tr tr part is averaged (exact
  // control variate; the mean is unchanged, the variance drops ~1000x).
  const double vol_factor = kPi * kPi / 4.0;  // (2pi)^4 pi^2 / (64 pi^4)
  std::vector<double> sums(kChunks, 0.0), sums2(kChunks, 0.0);
  const std::int64_t per = n_samples / kChunks;
  const std::int64_t rem = n_samples % kChunks;
  run_chunks(threads, [&](int c) {
    Rng rng = make_rng(seed, {0x6D1Cu, static_cast<std::uint64_t>(c)});
    std::uniform_real_distribution<double> ua(0.0, 2.0 * kPi);
    std::uniform_real_distribution<double> ub(0.0, kPi);
    const std::int64_t mcount = per + (c < rem ? 1 : 0);
    double s = 0.0, s2 = 0.0;
    for (std::int64_t i = 0; i < mcount; ++i) {
      const double a1 = ua(rng), c1 = ua(rng), b1 = ub(rng);
      const double a2 = ua(rng), c2 = ua(rng), b2 = ub(rng);
      const Matrix3d g1 = sphere::rotation_from_euler(a1, b1, c1);
      const Matrix3d g2 = sphere::rotation_from_euler(a2, b2, c2);
      const double t1 = (g1.transpose() * m).trace();
      const double t2 = (g2.transpose() * m).trace();
      const double val = vol_factor * std::sin(b1) * std::sin(b2) * b1 * b2 *
                         std::cos(a1 - a2) * model.c * model.c * t1 * t2;
      s += val;
      s2 += val * val;
    }
    sums[c] = s;
    sums2[c] = s2;
  });
  double total = 0.0, total2 = 0.0;
  for (int c = 0; c < kChunks; ++c) {
    total += sums[c];
    total2 += sums2[c];
  }
  const double n = static_cast<double>(n_samples);
  out.numeric = total / n;
  out.std_error = std::sqrt(std::max(0.0, total2 / n - out.numeric * out.numeric) / n);
  return out;
}

}  // namespace orbitkit::bayes_reg
