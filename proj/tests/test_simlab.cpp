#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "orbitkit/errors.hpp"
#include "orbitkit/rng.hpp"
#include "orbitkit/simlab.hpp"

using namespace orbitkit;
using namespace orbitkit::simlab;
using Eigen::Vector3d;

namespace {

SimulationConfig small_config() {
  SimulationConfig cfg;
  cfg.k = 30;
  cfg.n_draws = 60;
  cfg.sigma_grid = {0.1, 0.3};
  cfg.master_seed = 777;
  return cfg;
}

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("generate_draw: noiseless limit, determinism, concentration in sigma") {
  SimulationConfig cfg = small_config();
  auto d0 = generate_draw(cfg, 1e-12, 3);
  for (size_t l = 0; l < d0.k(); ++l)
    CHECK((d0.observations[l] - cfg.true_gamma * d0.design[l]).norm() < 1e-9);

  auto a = generate_draw(cfg, 0.4, 7);
  auto b = generate_draw(cfg, 0.4, 7);
  for (size_t l = 0; l < a.k(); ++l) {
    CHECK((a.design[l] - b.design[l]).norm() == 0.0);
    CHECK((a.observations[l] - b.observations[l]).norm() == 0.0);
  }

  // E[<y, gamma theta>] decreasing in sigma
  double prev = 1.0;
  for (double sigma : {0.1, 0.4, 0.8}) {
    double acc = 0.0;
    int count = 0;
    for (int i = 0; i < 50; ++i) {
      auto d = generate_draw(cfg, sigma, i);
      for (size_t l = 0; l < d.k(); ++l) {
        acc += d.observations[l].dot(cfg.true_gamma * d.design[l]);
        ++count;
      }
    }
    const double mean = acc / count;
    CHECK(mean < prev);
    prev = mean;
  }
  CHECK(prev > 0.3);  // still concentrated at sigma = 0.8
}

TEST_CASE("design policies: fixed design shared across draws and sigmas") {
  SimulationConfig cfg = small_config();
  auto a = generate_draw(cfg, 0.1, 0);
  auto b = generate_draw(cfg, 0.7, 5);
  for (size_t l = 0; l < a.k(); ++l) CHECK((a.design[l] - b.design[l]).norm() == 0.0);

  cfg.design_policy = DesignPolicy::RedrawnPerDraw;
  auto c = generate_draw(cfg, 0.1, 0);
  auto d = generate_draw(cfg, 0.1, 1);
  double diff = 0.0;
  for (size_t l = 0; l < c.k(); ++l) diff += (c.design[l] - d.design[l]).norm();
  CHECK(diff > 1e-3);
}

TEST_CASE("ks statistic: two-point sample and degenerate samples") {
  const double d = ks_statistic_normal({-1.0, 1.0});
  const double phi1 = 0.5 * std::erfc(-1.0 / std::sqrt(2.0));
  CHECK(d == doctest::Approx(phi1 - 0.5).epsilon(1e-12));  // 0.3413...

  std::vector<double> constant(50, 0.7);
  auto [dc, pc] = ks_test_normal(constant);
  CHECK(pc < 1e-6);

  CHECK_THROWS_WITH_AS(ks_test_normal({1.0, 2.0}), doctest::Contains("TooFewSamples"), Error);
}

TEST_CASE("ks p-value calibration on standard normal samples") {
  Rng rng = make_rng(71, {0});
  std::normal_distribution<double> nd(0.0, 1.0);
  int reject = 0;
  const int reps = 400;
  for (int r = 0; r < reps; ++r) {
    std::vector<double> s(1000);
    for (auto& v : s) v = nd(rng);
    auto [d, p] = ks_test_normal(s);
    if (p < 0.05) ++reject;
  }
  const double frac = static_cast<double>(reject) / reps;
  CHECK(frac >= 0.02);
  CHECK(frac <= 0.08);
}

TEST_CASE("kolmogorov distribution endpoints") {
  CHECK(kolmogorov_q(0.0) == 1.0);
  CHECK(kolmogorov_q(0.2) > 1.0 - 1e-9);
  CHECK(kolmogorov_q(3.0) < 1e-7);
  // both series branches agree with the reference values around the switch
  CHECK(kolmogorov_q(0.7499) == doctest::Approx(0.6273353902).epsilon(1e-8));
  CHECK(kolmogorov_q(0.7501) == doctest::Approx(0.6269986980).epsilon(1e-8));
  CHECK(kolmogorov_q(1.0) == doctest::Approx(0.2699996717).epsilon(1e-8));
}

TEST_CASE("run_simulation: whitening identities, determinism, small-noise normality") {
  SimulationConfig cfg = small_config();
  cfg.k = 100;
  cfg.n_draws = 100;
  cfg.sigma_grid = {0.01};
  auto report = run_simulation(cfg);
  const auto& sr = report.per_sigma[0];
  CHECK(sr.failure_count == 0);

  Vector3d mean = Vector3d::Zero();
  Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
  for (const auto& xi : sr.whitened) mean += xi;
  mean /= static_cast<double>(sr.whitened.size());
  CHECK(mean.norm() < 1e-10);
  for (const auto& xi : sr.whitened) cov += xi * xi.transpose();
  cov /= static_cast<double>(sr.whitened.size() - 1);
  CHECK((cov - Eigen::Matrix3d::Identity()).norm() < 1e-8);

  for (int j = 0; j < 3; ++j) CHECK(sr.ks_pvalue(j) > 0.01);

  auto report2 = run_simulation(cfg);
  for (int i = 0; i < cfg.n_draws; ++i) {
    CHECK(report2.per_sigma[0].draws[i].a == sr.draws[i].a);
    CHECK(report2.per_sigma[0].draws[i].b == sr.draws[i].b);
    CHECK(report2.per_sigma[0].draws[i].c == sr.draws[i].c);
  }
}

TEST_CASE("run_simulation: dispersion grows with sigma; threads do not change results") {
  SimulationConfig cfg = small_config();
  cfg.k = 50;
  cfg.n_draws = 150;
  cfg.sigma_grid = {0.1, 0.3, 0.6};
  auto report = run_simulation(cfg);
  double prev = -1.0;
  for (const auto& sr : report.per_sigma) {
    const double disp = sr.covariance.trace();
    CHECK(disp > prev * 0.95);  // nondecreasing with 5% MC slack
    prev = disp;
  }

  cfg.threads = 4;
  auto parallel = run_simulation(cfg);
  for (size_t s = 0; s < report.per_sigma.size(); ++s)
    for (int i = 0; i < cfg.n_draws; ++i)
      CHECK(parallel.per_sigma[s].draws[i].a == report.per_sigma[s].draws[i].a);
}

TEST_CASE("covariance fluctuation shrinks ~ sqrt(2) when draws double") {
  SimulationConfig cfg = small_config();
  cfg.k = 16;
  cfg.sigma_grid = {0.3};
  auto fluct = [&](int n_draws, int reps) {
    std::vector<double> norms;
    for (int r = 0; r < reps; ++r) {
      cfg.n_draws = n_draws;
      cfg.master_seed = 1000 + r;  // independent experiments
      auto rep = run_simulation(cfg);
      norms.push_back(rep.per_sigma[0].covariance.norm());
    }
    double m = 0.0, v = 0.0;
    for (double x : norms) m += x;
    m /= norms.size();
    for (double x : norms) v += (x - m) * (x - m);
    return std::sqrt(v / (norms.size() - 1));
  };
  const double f1 = fluct(150, 40);
  const double f2 = fluct(300, 40);
  const double ratio = f1 / f2;
  CHECK(ratio > 1.05);
  CHECK(ratio < 1.95);
}

TEST_CASE("emit_artifacts: file inventory, determinism, empty grid") {
  namespace fs = std::filesystem;
  SimulationConfig cfg = small_config();
  cfg.k = 40;
  cfg.n_draws = 80;
  cfg.sigma_grid = {0.2, 0.5};
  auto report = run_simulation(cfg);
  const std::string dir1 = (fs::temp_directory_path() / "orbitkit_sim_a").string();
  const std::string dir2 = (fs::temp_directory_path() / "orbitkit_sim_b").string();
  fs::remove_all(dir1);
  fs::remove_all(dir2);
  emit_artifacts(report, dir1);
  emit_artifacts(report, dir2);

  CHECK(fs::exists(dir1 + "/ks_summary.csv"));
  int csvs = 0, svgs = 0;
  for (const auto& e : fs::directory_iterator(dir1)) {
    if (e.path().extension() == ".csv") ++csvs;
    if (e.path().extension() == ".svg") ++svgs;
  }
  CHECK(csvs == 3);  // summary + one per sigma
  CHECK(svgs == 6);  // 2 sigmas x 3 coordinates

  for (const auto& e : fs::directory_iterator(dir1)) {
    const std::string other = dir2 + "/" + e.path().filename().string();
    CHECK(slurp(e.path().string()) == slurp(other));
  }

  SimulationConfig empty = small_config();
  empty.sigma_grid = {};
  auto er = run_simulation(empty);
  const std::string dir3 = (fs::temp_directory_path() / "orbitkit_sim_c").string();
  fs::remove_all(dir3);
  emit_artifacts(er, dir3);
  const std::string summary = slurp(dir3 + "/ks_summary.csv");
  CHECK(summary.find("coordinate") == 0);  // header plus coordinate rows only
}
