#include "orbitkit/simlab.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <thread>

#include "orbitkit/csv.hpp"
#include "orbitkit/errors.hpp"
#include "orbitkit/rng.hpp"

namespace orbitkit::simlab {

using Eigen::Matrix3d;
using Eigen::Vector3d;

namespace {
constexpr double kPi = 3.14159265358979323846;

double wrap_pi(double s) {
  // into (-pi, pi]
  s = std::fmod(s, 2.0 * kPi);
  if (s <= -kPi) s += 2.0 * kPi;
  if (s > kPi) s -= 2.0 * kPi;
  return s;
}

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

std::vector<Eigen::Vector3d> make_design(const SimulationConfig& cfg, double sigma, int draw_index) {
  Rng rng = (cfg.design_policy == DesignPolicy::FixedAcrossDraws)
                ? make_rng(cfg.master_seed, {0xDE51u})
                : make_rng(cfg.master_seed, {0xDE51u, std::bit_cast<std::uint64_t>(sigma),
                                             static_cast<std::uint64_t>(draw_index)});
  std::vector<Eigen::Vector3d> design(cfg.k);
  for (int l = 0; l < cfg.k; ++l) design[l] = sphere::sample_uniform_s2(rng);
  return design;
}

}  // namespace

Matrix3d SimulationConfig::default_true_gamma() {
  return sphere::rotation_from_euler(0.7, 1.1, 0.4);
}

void SimulationConfig::validate() const {
  if (k < 3) fail(ErrorCode::DomainError, "SimulationConfig: k >= 3");
  if (n_draws < 2) fail(ErrorCode::DomainError, "SimulationConfig: n_draws >= 2");
  for (double s : sigma_grid)
    if (s <= 0.0) fail(ErrorCode::DomainError, "SimulationConfig: sigma > 0");
  if (!sphere::is_rotation(true_gamma))
    fail(ErrorCode::DomainError, "SimulationConfig: true_gamma must be a rotation");
}

regression::RegressionDataset generate_draw(const SimulationConfig& config, double sigma,
                                            int draw_index) {
  config.validate();
  regression::RegressionDataset data;
  data.design = make_design(config, sigma, draw_index);
  Rng rng = make_rng(config.master_seed,
                     {0xD4A3u, std::bit_cast<std::uint64_t>(sigma),
                      static_cast<std::uint64_t>(draw_index)});
  std::normal_distribution<double> nd(0.0, 1.0);
  data.observations.resize(config.k);
  for (int l = 0; l < config.k; ++l) {
    const Vector3d eps(nd(rng), nd(rng), nd(rng));
    const Vector3d u = config.true_gamma * data.design[l] + sigma * eps;
    const double norm = u.norm();
    if (norm <= 1e-12) {
      data.observations[l] = config.true_gamma * data.design[l];
    } else {
      data.observations[l] = u / norm;
    }
  }
  return data;
}

double ks_statistic_normal(std::vector<double> samples) {
  if (samples.empty()) fail(ErrorCode::TooFewSamples, "ks_statistic_normal: empty sample");
  std::sort(samples.begin(), samples.end());
  const double n = static_cast<double>(samples.size());
  double d = 0.0;
  for (size_t i = 0; i < samples.size(); ++i) {
    const double f = std_normal_cdf(samples[i]);
    d = std::max(d, std::max((i + 1) / n - f, f - i / n));
  }
  return d;
}

double kolmogorov_q(double t) {
  if (t <= 0.0) return 1.0;
  if (t < 0.75) {
    // dual theta series, accurate for small t where the direct one is slow
    const double f = std::sqrt(2.0 * kPi) / t;
    double acc = 0.0;
    for (int j = 1; j < 100; ++j) {
      const double term = std::exp(-std::pow((2.0 * j - 1) * kPi, 2) / (8.0 * t * t));
      acc += term;
      if (term < 1e-10) break;
    }
    return std::clamp(1.0 - f * acc, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int j = 1; j < 200; ++j) {
    const double term = std::exp(-2.0 * j * j * t * t);
    acc += (j % 2 ? 1.0 : -1.0) * term;
    if (term < 1e-10) break;
  }
  return std::clamp(2.0 * acc, 0.0, 1.0);
}

std::pair<double, double> ks_test_normal(const std::vector<double>& samples) {
  if (samples.size() < 8) fail(ErrorCode::TooFewSamples, "ks_test_normal: need >= 8 samples");
  const double d = ks_statistic_normal(samples);
  const double p = kolmogorov_q(std::sqrt(static_cast<double>(samples.size())) * d);
  return {d, p};
}

SimulationReport run_simulation(const SimulationConfig& config) {
  config.validate();
  SimulationReport report;
  report.config = config;
  report.per_sigma.reserve(config.sigma_grid.size());

  for (size_t si = 0; si < config.sigma_grid.size(); ++si) {
    const double sigma = config.sigma_grid[si];
    SigmaReport sr;
    sr.sigma = sigma;
    sr.draws.resize(config.n_draws);
    std::vector<char> ok(config.n_draws, 0);

    std::atomic<int> next{0};
    auto worker = [&] {
      for (;;) {
        const int i = next.fetch_add(1);
        if (i >= config.n_draws) return;
        auto data = generate_draw(config, sigma, i);
        try {
          auto fit = regression::fit_intrinsic_so3(data);
          sr.draws[i] = sphere::euler_from_rotation(fit.gamma);
          ok[i] = 1;
        } catch (const Error&) {
          ok[i] = 0;
        }
      }
    };
    if (config.threads <= 1) {
      worker();
    } else {
      std::vector<std::thread> pool;
      for (int t = 0; t < config.threads; ++t) pool.emplace_back(worker);
      for (auto& th : pool) th.join();
    }

    std::vector<Vector3d> angles;
    angles.reserve(config.n_draws);
    for (int i = 0; i < config.n_draws; ++i) {
      if (!ok[i]) {
        ++sr.failure_count;
        continue;
      }
      angles.emplace_back(sr.draws[i].a, sr.draws[i].b, sr.draws[i].c);
    }
    const int n = static_cast<int>(angles.size());
    if (n >= 2) {
      // circular mean per coordinate, then wrapped deviations re-centered to
      // exact zero mean
      Vector3d sin_sum = Vector3d::Zero(), cos_sum = Vector3d::Zero();
      for (const auto& x : angles) {
        sin_sum += x.array().sin().matrix();
        cos_sum += x.array().cos().matrix();
      }
      Vector3d m0;
      for (int j = 0; j < 3; ++j) m0(j) = std::atan2(sin_sum(j), cos_sum(j));
      std::vector<Vector3d> dev(n);
      Vector3d dmean = Vector3d::Zero();
      for (int i = 0; i < n; ++i) {
        for (int j = 0; j < 3; ++j) dev[i](j) = wrap_pi(angles[i](j) - m0(j));
        dmean += dev[i];
      }
      dmean /= n;
      Matrix3d cov = Matrix3d::Zero();
      for (int i = 0; i < n; ++i) {
        dev[i] -= dmean;
        cov += dev[i] * dev[i].transpose();
      }
      cov /= (n - 1);
      sr.mean = m0 + dmean;
      for (int j = 0; j < 3; ++j) {
        sr.mean(j) = std::fmod(sr.mean(j), 2.0 * kPi);
        if (sr.mean(j) < 0) sr.mean(j) += 2.0 * kPi;
      }
      sr.covariance = cov;
      Eigen::LLT<Matrix3d> llt(cov);
      if (llt.info() != Eigen::Success)
        fail(ErrorCode::DomainError, "run_simulation: sample covariance not positive definite");
      sr.cholesky = llt.matrixL();
      sr.whitened.resize(n);
      for (int i = 0; i < n; ++i)
        sr.whitened[i] = sr.cholesky.triangularView<Eigen::Lower>().solve(dev[i]);
      for (int j = 0; j < 3; ++j) {
        std::vector<double> coord(n);
        for (int i = 0; i < n; ++i) coord[i] = sr.whitened[i](j);
        auto [d, p] = ks_test_normal(coord);
        sr.ks_statistic(j) = d;
        sr.ks_pvalue(j) = p;
      }
    }
    report.per_sigma.push_back(std::move(sr));
  }
  return report;
}

namespace {

std::string sigma_label(double s) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", s);
  return buf;
}

void write_histogram_svg(const std::string& path, const std::vector<double>& samples,
                         const std::string& title, double pvalue) {
  constexpr int kBins = 20;
  constexpr double kLo = -4.0, kHi = 4.0;
  constexpr int kW = 400, kH = 300, kMargin = 36;
  std::vector<int> counts(kBins, 0);
  for (double s : samples) {
    if (s < kLo || s >= kHi) continue;
    counts[static_cast<int>((s - kLo) / (kHi - kLo) * kBins)]++;
  }
  const double binw = (kHi - kLo) / kBins;
  const double n = static_cast<double>(samples.size());
  double ymax = 0.45;  // density scale; normal peak ~ 0.3989
  for (int b = 0; b < kBins; ++b) ymax = std::max(ymax, counts[b] / (n * binw));

  std::ofstream f(path);
  if (!f) fail(ErrorCode::IoError, "cannot open for writing: " + path);
  auto xmap = [&](double x) { return kMargin + (x - kLo) / (kHi - kLo) * (kW - 2 * kMargin); };
  auto ymap = [&](double y) { return kH - kMargin - y / ymax * (kH - 2 * kMargin); };
  f << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW << "\" height=\"" << kH
    << "\" viewBox=\"0 0 " << kW << " " << kH << "\">\n";
  f << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (int b = 0; b < kBins; ++b) {
    const double x0 = kLo + b * binw;
    const double dens = counts[b] / (n * binw);
    f << "<rect x=\"" << csv::format_scalar(xmap(x0)) << "\" y=\"" << csv::format_scalar(ymap(dens))
      << "\" width=\"" << csv::format_scalar(xmap(x0 + binw) - xmap(x0)) << "\" height=\""
      << csv::format_scalar(ymap(0) - ymap(dens))
      << "\" fill=\"#7aa6c2\" stroke=\"#40617a\" stroke-width=\"0.5\"/>\n";
  }
  f << "<polyline fill=\"none\" stroke=\"#c24040\" stroke-width=\"1.5\" points=\"";
  for (int i = 0; i <= 160; ++i) {
    const double x = kLo + (kHi - kLo) * i / 160.0;
    const double dens = std::exp(-0.5 * x * x) / std::sqrt(2.0 * kPi);
    f << csv::format_scalar(xmap(x)) << ',' << csv::format_scalar(ymap(dens)) << ' ';
  }
  f << "\"/>\n";
  f << "<line x1=\"" << kMargin << "\" y1=\"" << kH - kMargin << "\" x2=\"" << kW - kMargin
    << "\" y2=\"" << kH - kMargin << "\" stroke=\"black\"/>\n";
  char pbuf[64];
  std::snprintf(pbuf, sizeof(pbuf), "p=%.2f", pvalue);
  f << "<text x=\"" << kMargin << "\" y=\"20\" font-size=\"12\">" << title << "  " << pbuf
    << "</text>\n";
  f << "</svg>\n";
}

}  // namespace

void emit_artifacts(const SimulationReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create output directory: " + out_dir);

  const char* coord_names[3] = {"a", "b", "c"};
  {
    std::ofstream f(out_dir + "/ks_summary.csv");
    if (!f) fail(ErrorCode::IoError, "cannot write ks_summary.csv");
    f << "coordinate";
    for (const auto& sr : report.per_sigma) f << ",sigma=" << sigma_label(sr.sigma);
    f << '\n';
    for (int j = 0; j < 3; ++j) {
      f << coord_names[j];
      for (const auto& sr : report.per_sigma) f << ',' << csv::format_scalar(sr.ks_pvalue(j));
      f << '\n';
    }
  }
  for (const auto& sr : report.per_sigma) {
    const std::string tag = sigma_label(sr.sigma);
    {
      std::ofstream f(out_dir + "/euler_sigma_" + tag + ".csv");
      if (!f) fail(ErrorCode::IoError, "cannot write euler CSV");
      for (const auto& e : sr.draws)
        f << csv::format_scalar(e.a) << ',' << csv::format_scalar(e.b) << ','
          << csv::format_scalar(e.c) << '\n';
    }
    for (int j = 0; j < 3; ++j) {
      std::vector<double> coord(sr.whitened.size());
      for (size_t i = 0; i < sr.whitened.size(); ++i) coord[i] = sr.whitened[i](j);
      write_histogram_svg(out_dir + "/hist_sigma_" + tag + "_" + coord_names[j] + ".svg", coord,
                          "sigma=" + tag + " " + coord_names[j], sr.ks_pvalue(j));
    }
  }
}

}  // namespace orbitkit::simlab
