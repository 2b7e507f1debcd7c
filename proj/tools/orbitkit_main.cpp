// orbitkit command line: projection onto matrix-group orbits, second-order
// Bayes estimators with linear priors, spherical regression of rotations and
// the Monte Carlo simulation harness.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "orbitkit/bayes_estimator.hpp"
#include "orbitkit/bayes_regression.hpp"
#include "orbitkit/csv.hpp"
#include "orbitkit/errors.hpp"
#include "orbitkit/matdecomp.hpp"
#include "orbitkit/orbits.hpp"
#include "orbitkit/regression.hpp"
#include "orbitkit/rng.hpp"
#include "orbitkit/simlab.hpp"
#include "orbitkit/sphere_geom.hpp"

namespace {

using json = nlohmann::json;
using namespace orbitkit;

constexpr std::uint64_t kDefaultSeed = 20260811ULL;  // fixed documented default

std::uint64_t resolve_seed(std::uint64_t flag_seed) {
  // ORBITKIT_SEED overrides the flag when set
  if (const char* env = std::getenv("ORBITKIT_SEED")) {
    try {
      return std::stoull(env);
    } catch (...) {
      fail(ErrorCode::DomainError, "ORBITKIT_SEED is not an integer");
    }
  }
  return flag_seed;
}

orbits::OrbitSpec parse_orbit(const std::string& kind, const std::vector<int>& params,
                              const std::string& base_path,
                              const Eigen::MatrixXd* input_shape_hint_real,
                              const Eigen::MatrixXcd* input_shape_hint_cplx) {
  auto dim_from_input = [&]() -> std::pair<int, int> {
    if (input_shape_hint_real)
      return {static_cast<int>(input_shape_hint_real->rows()),
              static_cast<int>(input_shape_hint_real->cols())};
    if (input_shape_hint_cplx)
      return {static_cast<int>(input_shape_hint_cplx->rows()),
              static_cast<int>(input_shape_hint_cplx->cols())};
    fail(ErrorCode::DomainError, "cannot infer dimensions without an input matrix");
  };
  if (kind == "sphere") {
    auto [r, c] = dim_from_input();
    return orbits::OrbitSpec::sphere(static_cast<int>(std::max(r, c)));
  }
  if (kind == "stiefel") {
    auto [r, c] = dim_from_input();
    return orbits::OrbitSpec::stiefel(params.size() >= 1 ? params[0] : c, r);
  }
  if (kind == "grassmannian") {
    if (params.empty()) fail(ErrorCode::DomainError, "grassmannian needs --params k[,n]");
    auto [r, c] = dim_from_input();
    return orbits::OrbitSpec::grassmannian(params[0], params.size() >= 2 ? params[1] : r);
  }
  if (kind == "svd") {
    if (base_path.empty()) fail(ErrorCode::DomainError, "svd orbit needs --base theta.csv");
    Eigen::MatrixXd theta = csv::read_matrix_file(base_path);
    const int r = static_cast<int>(theta.rows()), c = static_cast<int>(theta.cols());
    Eigen::VectorXd sig(std::min(r, c));
    for (int i = 0; i < sig.size(); ++i) sig(i) = theta(i, i);
    return orbits::OrbitSpec::svd_orbit(sig, r, c);
  }
  if (kind == "lagrangian") {
    auto [r, c] = dim_from_input();
    return orbits::OrbitSpec::lagrangian(r);
  }
  if (kind == "isotropic") {
    if (params.empty()) fail(ErrorCode::DomainError, "isotropic needs --params k[,n]");
    auto [r, c] = dim_from_input();
    return orbits::OrbitSpec::isotropic(params[0], params.size() >= 2 ? params[1] : r);
  }
  if (kind == "complexstructures") {
    auto [r, c] = dim_from_input();
    return orbits::OrbitSpec::complex_structures(r);
  }
  if (kind == "so") {
    auto [r, c] = dim_from_input();
    return orbits::OrbitSpec::special_orthogonal(r);
  }
  fail(ErrorCode::DomainError, "unknown orbit kind: " + kind +
                                   " (expected sphere|stiefel|grassmannian|svd|lagrangian|"
                                   "isotropic|complexstructures|so)");
}

int cmd_project(const std::string& kind, const std::vector<int>& params, const std::string& in_path,
                const std::string& base_path, const std::string& out_path) {
  const bool complex_kind = (kind == "lagrangian" || kind == "isotropic");
  std::optional<Eigen::MatrixXd> xr;
  std::optional<Eigen::MatrixXcd> xc;
  if (complex_kind)
    xc = csv::read_complex_matrix_file(in_path);
  else
    xr = csv::read_matrix_file(in_path);
  orbits::OrbitSpec spec = parse_orbit(kind, params, base_path, xr ? &*xr : nullptr, xc ? &*xc : nullptr);
  orbits::OrbitPoint p = complex_kind ? orbits::project(spec, orbits::OrbitValue(*xc))
                                      : orbits::project(spec, orbits::OrbitValue(*xr));
  if (out_path.empty()) {
    if (complex_kind)
      csv::write_matrix(std::cout, p.complex());
    else
      csv::write_matrix(std::cout, p.real());
  } else {
    if (complex_kind)
      csv::write_matrix_file(out_path, p.complex());
    else
      csv::write_matrix_file(out_path, p.real());
  }
  return 0;
}

int cmd_estimate(const std::string& x_path, const std::string& v_path, double alpha, double epsilon,
                 const std::string& out_path) {
  Eigen::MatrixXd xm = csv::read_matrix_file(x_path);
  Eigen::VectorXd x = Eigen::Map<Eigen::VectorXd>(xm.data(), xm.size());
  Eigen::VectorXd v = Eigen::VectorXd::Zero(x.size());
  if (!v_path.empty()) {
    Eigen::MatrixXd vm = csv::read_matrix_file(v_path);
    v = Eigen::Map<Eigen::VectorXd>(vm.data(), vm.size());
  }
  bayes::LinearPrior prior = bayes::LinearPrior::for_sphere(v, alpha);
  auto spec = orbits::OrbitSpec::sphere(static_cast<int>(x.size()));
  auto res = bayes::bayes_estimate_orbit(spec, x, prior, epsilon);
  auto risk = bayes::bayes_risk_s2(prior, epsilon);
  std::ostream* os = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) fail(ErrorCode::IoError, "cannot open " + out_path);
    os = &file;
  }
  const Eigen::MatrixXd& est = res.estimate.real();
  for (Eigen::Index i = 0; i < est.size(); ++i)
    *os << (i ? "," : "") << csv::format_scalar(est(i));
  *os << '\n' << csv::format_scalar(res.step_length) << '\n'
      << csv::format_scalar(risk.order2_coeff) << ',' << csv::format_scalar(risk.order4_coeff)
      << '\n';
  return 0;
}

int cmd_regress(const std::string& method, const std::string& data_path, const std::string& out_path,
                const std::string& json_path) {
  Eigen::MatrixXd table = csv::read_matrix_file(data_path);
  if (table.cols() != 6)
    fail(ErrorCode::IoError, "regress: pairs.csv must have 6 columns (tx,ty,tz,yx,yy,yz)");
  regression::RegressionDataset data;
  for (Eigen::Index i = 0; i < table.rows(); ++i) {
    data.design.emplace_back(table(i, 0), table(i, 1), table(i, 2));
    data.observations.emplace_back(table(i, 3), table(i, 4), table(i, 5));
  }
  regression::RegressionFit fit = (method == "intrinsic") ? regression::fit_intrinsic_so3(data)
                                                          : regression::fit_extrinsic_so3(data);
  if (out_path.empty())
    csv::write_matrix(std::cout, Eigen::MatrixXd(fit.gamma));
  else
    csv::write_matrix_file(out_path, Eigen::MatrixXd(fit.gamma));
  json diag{{"method", method},
            {"iterations", fit.iterations},
            {"residual_norm", fit.residual_norm},
            {"converged", fit.converged}};
  if (json_path.empty()) {
    std::cout << diag.dump() << '\n';
  } else {
    std::ofstream f(json_path);
    if (!f) fail(ErrorCode::IoError, "cannot open " + json_path);
    f << diag.dump() << '\n';
  }
  return 0;
}

std::vector<double> parse_sigma_grid(const std::string& s) {
  // "start:end:step" or a comma list
  std::vector<double> out;
  if (s.find(':') != std::string::npos) {
    double a, b, st;
    if (std::sscanf(s.c_str(), "%lf:%lf:%lf", &a, &b, &st) != 3 || st <= 0)
      fail(ErrorCode::DomainError, "--sigmas expects start:end:step");
    const int count = static_cast<int>(std::floor((b - a) / st + 1e-9)) + 1;
    for (int i = 0; i < count; ++i) out.push_back(a + i * st);
    return out;
  }
  std::stringstream ss(s);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(std::stod(tok));
  return out;
}

int cmd_simulate(int k, int draws, const std::string& sigmas, std::uint64_t seed,
                 const std::string& out_dir, const std::string& design, int threads) {
  simlab::SimulationConfig cfg;
  cfg.k = k;
  cfg.n_draws = draws;
  cfg.sigma_grid = parse_sigma_grid(sigmas);
  cfg.master_seed = seed;
  cfg.threads = threads;
  cfg.design_policy = (design == "redrawn") ? simlab::DesignPolicy::RedrawnPerDraw
                                            : simlab::DesignPolicy::FixedAcrossDraws;
  auto report = simlab::run_simulation(cfg);
  simlab::emit_artifacts(report, out_dir);
  int failures = 0;
  for (const auto& sr : report.per_sigma) failures += sr.failure_count;
  json summary{{"sigmas", cfg.sigma_grid}, {"draws", cfg.n_draws}, {"failures", failures}};
  json pv = json::array();
  for (const auto& sr : report.per_sigma)
    pv.push_back({{"sigma", sr.sigma},
                  {"p", {sr.ks_pvalue(0), sr.ks_pvalue(1), sr.ks_pvalue(2)}}});
  summary["ks_pvalues"] = pv;
  std::cout << summary.dump(2) << '\n';
  return failures == 0 ? 0 : 1;
}

int cmd_bayes_verify(double c, std::int64_t samples, std::uint64_t seed, int threads) {
  bayes_reg::PosteriorModel model;
  model.c = c;
  Rng rng = make_rng(seed, {0xFACEu});
  model.x_statistic = sphere::sample_haar_so3(rng);
  const Eigen::Matrix3d gamma_hat = sphere::sample_haar_so3(rng);
  const Eigen::Matrix3d alpha_test = sphere::sample_haar_so3(rng);
  auto res = bayes_reg::verify_posterior_integral(model, gamma_hat, alpha_test, samples, seed, threads);
  const double denom = std::max(std::abs(res.analytic), 1e-300);
  json out{{"numeric", res.numeric},
           {"analytic", res.analytic},
           {"std_error", res.std_error},
           {"relative_error", std::abs(res.numeric - res.analytic) / denom}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"orbitkit: projections onto matrix-group orbits, Bayes estimators with linear "
               "priors, and spherical regression of rotations"};
  app.require_subcommand(1);

  // project
  std::string pr_kind, pr_in, pr_base, pr_out;
  std::vector<int> pr_params;
  auto* project = app.add_subcommand("project", "Project a matrix onto an orbit");
  project->add_option("--orbit", pr_kind,
                      "Orbit kind: sphere|stiefel|grassmannian|svd|lagrangian|isotropic|"
                      "complexstructures|so")->required();
  project->add_option("--params", pr_params, "Dimension parameters k[,n]")->delimiter(',');
  project->add_option("--in", pr_in, "Input matrix CSV")->required();
  project->add_option("--base", pr_base, "Base point CSV (svd orbit)");
  project->add_option("--out", pr_out, "Output CSV (default: stdout)");

  // estimate
  std::string es_orbit = "sphere", es_x, es_v, es_out;
  double es_alpha = 0.0, es_eps = 0.1;
  auto* estimate = app.add_subcommand("estimate", "Second-order Bayes estimate with a linear prior");
  estimate->add_option("--orbit", es_orbit, "Orbit (sphere)")->check(CLI::IsMember({"sphere"}));
  estimate->add_option("--x", es_x, "Observation vector CSV")->required();
  estimate->add_option("--v", es_v, "Prior direction CSV");
  estimate->add_option("--alpha", es_alpha, "Prior strength in [0,1)");
  estimate->add_option("--epsilon", es_eps, "Noise scale")->required();
  estimate->add_option("--out", es_out, "Output CSV (default: stdout)");

  // regress
  std::string rg_method = "extrinsic", rg_data, rg_out, rg_json;
  auto* regress = app.add_subcommand("regress", "Fit a rotation to paired points on S^2");
  regress->add_option("--method", rg_method, "extrinsic|intrinsic")
      ->check(CLI::IsMember({"extrinsic", "intrinsic"}));
  regress->add_option("--data", rg_data, "pairs.csv with 6 columns")->required();
  regress->add_option("--out", rg_out, "Rotation CSV (default: stdout)");
  regress->add_option("--json", rg_json, "Diagnostics JSON path (default: stdout)");

  // simulate
  int sm_k = 100, sm_draws = 1000, sm_threads = 1;
  std::string sm_sigmas = "0.1:0.9:0.1", sm_out = "simout", sm_design = "fixed";
  std::uint64_t sm_seed = kDefaultSeed;
  auto* simulate = app.add_subcommand("simulate", "Euler-angle distribution of the intrinsic regressor");
  simulate->add_option("--k", sm_k, "Design points per draw");
  simulate->add_option("--draws", sm_draws, "Draws per sigma");
  simulate->add_option("--sigmas", sm_sigmas, "start:end:step or comma list");
  simulate->add_option("--seed", sm_seed, "Master seed (ORBITKIT_SEED overrides)");
  simulate->add_option("--out", sm_out, "Output directory")->required();
  simulate->add_option("--design", sm_design, "fixed|redrawn")
      ->check(CLI::IsMember({"fixed", "redrawn"}));
  simulate->add_option("--threads", sm_threads, "Worker threads");

  // bayes-verify
  double bv_c = 0.2;
  std::int64_t bv_samples = 1000000;
  std::uint64_t bv_seed = kDefaultSeed;
  int bv_threads = 1;
  auto* bverify = app.add_subcommand("bayes-verify", "Check the posterior first-order integral "
                                                     "against its closed form");
  bverify->add_option("--c", bv_c, "Coupling, |c| <= 0.3");
  bverify->add_option("--samples", bv_samples, "Monte Carlo samples");
  bverify->add_option("--seed", bv_seed, "Seed (ORBITKIT_SEED overrides)");
  bverify->add_option("--threads", bv_threads, "Worker threads");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    app.exit(e);
    return 64;
  }

  try {
    if (*project) return cmd_project(pr_kind, pr_params, pr_in, pr_base, pr_out);
    if (*estimate) return cmd_estimate(es_x, es_v, es_alpha, es_eps, es_out);
    if (*regress) return cmd_regress(rg_method, rg_data, rg_out, rg_json);
    if (*simulate)
      return cmd_simulate(sm_k, sm_draws, sm_sigmas, resolve_seed(sm_seed), sm_out, sm_design,
                          sm_threads);
    if (*bverify) return cmd_bayes_verify(bv_c, bv_samples, resolve_seed(bv_seed), bv_threads);
  } catch (const orbitkit::Error& e) {
    std::cerr << e.what() << '\n';
    switch (e.code()) {
      case ErrorCode::OutsideTube:
      case ErrorCode::ShapeMismatch:
      case ErrorCode::DomainError:
      case ErrorCode::PriorInvalid:
      case ErrorCode::IoError:
      case ErrorCode::RankGapViolation:
        return 2;
      default:
        return 1;  // computation errors: NoConvergence, DegenerateProjection, ...
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 64;
}
