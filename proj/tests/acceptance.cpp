// Acceptance suite. Each criterion prints one pass/fail line; the process
// exits with the number of failed criteria. argv[1] is the CLI binary path
// (consumed by the determinism criterion).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "gradmix/coefficients.hpp"
#include "gradmix/estimators.hpp"
#include "gradmix/experiment.hpp"
#include "gradmix/oracles.hpp"
#include "gradmix/rng.hpp"
#include "gradmix/testfns.hpp"

using namespace gradmix;

namespace {

std::string g_cli;

struct Failure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string& detail) {
  if (!ok) throw Failure(detail);
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}


// ---------------------------------------------------------------------

void criterion1_coefficients() {
  const auto table = mixing_coefficients(2, 1.0);
  require(std::fabs(table.normalized[0] - 0.691438) <= 1e-6,
          "a_1 = " + fmt(table.normalized[0]) + ", want 0.691438 +- 1e-6");
  require(std::fabs(table.normalized[1] - 0.308562) <= 1e-6,
          "a_2 = " + fmt(table.normalized[1]) + ", want 0.308562 +- 1e-6");
  for (int m = 1; m <= 64; ++m) {
    for (double h : {0.05, 0.1, 0.5, 1.0, 3.0}) {
      const auto t = mixing_coefficients(m, h);
      double sum = 0.0;
      for (double a : t.normalized) sum += a;
      require(std::fabs(sum - 1.0) <= 1e-12,
              "sum a_j off by " + fmt(sum - 1.0) + " at m=" +
                  std::to_string(m) + " h=" + fmt(h));
    }
  }
}

void criterion2_cfd_equivalence() {
  NormalStream stream(0xC2);
  const auto names = objective_names();
  const double sigmas[3] = {1e-1, 1e-2, 1e-3};
  const double hs[4] = {0.3, 0.5, 1.0, 1.5};
  for (int t = 0; t < 10; ++t) {
    const Objective obj = find_objective(names[t % names.size()]);
    Point x = obj.start;
    for (double& v : x) v += 0.05 * stream.next();
    const double sigma = sigmas[t % 3];
    const double h = hs[t % 4];
    const auto a = nmxfd(obj.eval, x, sigma, 1, h);
    const auto b = cfd(obj.eval, x, sigma, h);
    for (std::size_t i = 0; i < a.gradient.size(); ++i) {
      const double scale =
          std::max({std::fabs(a.gradient[i]), std::fabs(b.gradient[i]), 1e-300});
      require(std::fabs(a.gradient[i] - b.gradient[i]) <= 1e-15 * scale,
              obj.name + " component " + std::to_string(i) + ": nmxfd(m=1) " +
                  fmt(a.gradient[i]) + " vs cfd " + fmt(b.gradient[i]));
    }
  }
}

void criterion3_cubic_error_bound() {
  // cubic family sum x_i^3 in n = 3 variables; Hessian-Lipschitz constant 6
  const int n = 3;
  const EvalFn cubic = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v * v;
    return s;
  };
  const auto grad = [](std::span<const double> x) {
    Point g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 3.0 * x[i] * x[i];
    return g;
  };
  std::vector<Point> points{Point(n, 0.0)};
  NormalStream stream(0xC3);
  for (int k = 0; k < 10; ++k) {
    Point x(n);
    for (double& v : x) v = 0.1 * (stream.next_uniform() - 0.5);  // [-0.05, 0.05]
    points.push_back(x);
  }
  int violations = 0;
  for (double sigma : {1e-1, 1e-2, 1e-3}) {
    for (int m : {1, 2, 4, 8}) {
      for (double S : {1.0, 2.0, 3.0}) {
        for (const Point& x : points) {
          const auto est = nmxfd(cubic, x, sigma, m, S / m);
          const Point g = grad(x);
          double err2 = 0.0;
          for (int i = 0; i < n; ++i) {
            const double d = est.gradient[i] - g[i];
            err2 += d * d;
          }
          const auto report = make_bound_report(
              nmxfd_error_bound(6.0, sigma, S, n), std::sqrt(err2));
          if (!report.satisfied) ++violations;
        }
      }
    }
  }
  require(violations == 0,
          std::to_string(violations) + " bound violations on the cubic grid");
}

void criterion4_trapezoid_rate() {
  struct Case {
    const char* fn;
    int dim;
    Point x;
  };
  const Case cases[] = {{"exp_quadratic", 1, {0.31}},
                        {"trigonometric", 1, {0.47}},
                        {"beale", 2, {0.7, 0.4}}};
  const double sigma = 0.5;
  const double S = 3.0;
  for (const Case& c : cases) {
    const Objective obj = find_objective(c.fn, c.dim);
    std::vector<double> oracle(obj.dim);
    for (int i = 0; i < obj.dim; ++i) {
      oracle[i] = filtered_derivative_oracle(obj.eval, c.x, i, sigma, S, 1e-12,
                                             20'000'000);
    }
    double prev_err = -1.0;
    for (int m : {4, 8, 16, 32}) {
      const auto est = mxfd_unnormalized(obj.eval, c.x, sigma, m, S / m);
      double err = 0.0;
      for (int i = 0; i < obj.dim; ++i) {
        err = std::max(err, std::fabs(est.gradient[i] - oracle[i]));
      }
      if (prev_err > 0.0) {
        const double ratio = prev_err / err;
        require(ratio >= 3.0 && ratio <= 5.0,
                std::string(c.fn) + ": error ratio " + fmt(ratio) +
                    " at m=" + std::to_string(m) + " outside 4x +- 25%");
      }
      prev_err = err;
    }
  }
}

void criterion5_smoothing_gap() {
  const Objective ros = find_objective("rosenbrock2");
  NormalStream stream(0xC5);
  for (int p = 0; p < 5; ++p) {
    Point x{2.4 * stream.next_uniform() - 1.2, 2.4 * stream.next_uniform() - 1.2};
    for (double sigma : {1e-1, 1e-2}) {
      const Point lo{x[0] - 8.0 * sigma, x[1] - 8.0 * sigma};
      const Point hi{x[0] + 8.0 * sigma, x[1] + 8.0 * sigma};
      const double L = estimate_lipschitz_grad(ros.eval, lo, hi, 25,
                                               derive_seed(0xC5, {(std::uint64_t)p}));
      OracleAccuracy acc;
      acc.tol = 1e-6;
      const auto full = smoothed_gradient_oracle(ros.eval, x, sigma, acc);
      double gap2 = 0.0;
      for (int i = 0; i < 2; ++i) {
        const double filtered = filtered_derivative_oracle(
            ros.eval, x, i, sigma, 8.0, 1e-8, 10'000'000);
        const double d = full.value[i] - filtered;
        gap2 += d * d;
      }
      const auto report = make_bound_report(smoothing_gap_bound(L, sigma, 2),
                                            std::sqrt(gap2));
      require(report.satisfied,
              "gap " + fmt(report.observed) + " above bound " +
                  fmt(report.bound) + " at point " + std::to_string(p) +
                  " sigma " + fmt(sigma));
    }
  }
}

void criterion6_variance() {
  const Objective f = find_objective("sphere", 1);
  const Point x{1.0};
  const long trials = 100000;

  const auto cfd_run =
      variance_experiment(Scheme::Cfd, f, x, 1e-2, 1.0, 1, 1e-3, trials, 0xC6);
  require(std::fabs(cfd_run.theoretical - 5e-3) <= 1e-12,
          "cfd theory " + fmt(cfd_run.theoretical));
  require(std::fabs(cfd_run.empirical - 5e-3) <= 0.05 * 5e-3,
          "cfd empirical " + fmt(cfd_run.empirical) + " not within 5% of 5e-3");

  std::map<int, VarianceExperiment> nm;
  for (int m : {2, 4, 8}) {
    nm[m] = variance_experiment(Scheme::Nmxfd, f, x, 1e-2, 1.0, m, 1e-3,
                                trials, 0xC6 + m);
    require(nm[m].theoretical < cfd_run.theoretical,
            "variance formula not below cfd at m=" + std::to_string(m));
    require(nm[m].empirical < cfd_run.empirical,
            "empirical variance not below cfd at m=" + std::to_string(m));
  }
  require(std::fabs(nm[2].theoretical - 2.50946e-3) <= 1e-7,
          "nmxfd m=2 theory " + fmt(nm[2].theoretical));
  require(std::fabs(nm[2].empirical - nm[2].theoretical) <=
              0.05 * nm[2].theoretical,
          "nmxfd m=2 empirical " + fmt(nm[2].empirical) + " not within 5% of " +
              fmt(nm[2].theoretical));

  // variance falls like 1/N at fixed S: m * variance stays in a 2x band
  const double S = 3.0;
  double lo = 1e300, hi = 0.0;
  for (int m : {4, 8, 16, 32, 64}) {
    const double v = m * variance_nmxfd(1, 1e-3, 1e-2, S / m, m);
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  require(hi / lo < 2.0,
          "m*variance spread " + fmt(hi / lo) + " exceeds 2x over m in 4..64");
}

const ReportCell& find_cell(const BenchmarkReport& report,
                            const std::string& scheme, int multiplier,
                            int bucket) {
  for (const auto& cell : report.cells) {
    if (cell.scheme == scheme && cell.multiplier == multiplier &&
        cell.bucket == bucket) {
      return cell;
    }
  }
  throw Failure("missing cell " + scheme + " k=" + std::to_string(multiplier) +
                " bucket " + std::to_string(bucket));
}

void criterion7_noise_free_trend() {
  BenchmarkConfig cfg;
  cfg.sigma = 1e-5;
  cfg.seed = 1001;
  const auto report = run_benchmark(cfg, 2);

  const double cfd_med = find_cell(report, "cfd", 2, 0).median_log10_eta;
  require(std::isfinite(cfd_med), "cfd bucket-0 median undefined");

  for (int k : {2, 4, 8}) {
    const double v = find_cell(report, "nmxfd", k, 0).median_log10_eta;
    require(std::fabs(v - cfd_med) <= 1.0,
            "nmxfd " + std::to_string(k) + "n median " + fmt(v) +
                " not within 1.0 of cfd " + fmt(cfd_med));
    const double g = find_cell(report, "gsg", k, 0).median_log10_eta;
    require(g - cfd_med >= 3.0, "gsg " + std::to_string(k) + "n+1 median " +
                                     fmt(g) + " not 3.0 above cfd " +
                                     fmt(cfd_med));
    const double cg = find_cell(report, "cgsg", k, 0).median_log10_eta;
    require(cg - cfd_med >= 3.0, "cgsg " + std::to_string(k) + "n median " +
                                      fmt(cg) + " not 3.0 above cfd " +
                                      fmt(cfd_med));
  }
}

void criterion8_noisy_trend() {
  BenchmarkConfig cfg;
  cfg.sigma = 1e-2;
  cfg.lambda = 1e-3;
  cfg.realizations = 100;
  cfg.seed = 1002;
  const auto report = run_noisy_benchmark(cfg, 2);

  for (int b = 0; b < 7; ++b) {
    const ReportCell& cfd_cell = find_cell(report, "cfd", 2, b);
    const ReportCell& n4 = find_cell(report, "nmxfd", 4, b);
    const ReportCell& n8 = find_cell(report, "nmxfd", 8, b);
    const ReportCell& n12 = find_cell(report, "nmxfd", 12, b);
    if (cfd_cell.sample_count == 0 || n12.sample_count == 0) continue;
    require(n12.median_log10_eta <= cfd_cell.median_log10_eta + 0.1,
            "bucket " + std::to_string(b) + ": nmxfd 12n median " +
                fmt(n12.median_log10_eta) + " above cfd " +
                fmt(cfd_cell.median_log10_eta) + " + 0.1");
    require(n8.median_log10_eta <= n4.median_log10_eta + 0.05,
            "bucket " + std::to_string(b) + ": 8n median " +
                fmt(n8.median_log10_eta) + " not below 4n " +
                fmt(n4.median_log10_eta) + " + 0.05");
    require(n12.median_log10_eta <= n8.median_log10_eta + 0.05,
            "bucket " + std::to_string(b) + ": 12n median " +
                fmt(n12.median_log10_eta) + " not below 8n " +
                fmt(n8.median_log10_eta) + " + 0.05");
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), "missing output file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void criterion9_determinism() {
  require(!g_cli.empty(), "CLI binary path not supplied");
  const std::string base =
      "\"" + g_cli +
      "\" bench --sigma 1e-2 --lambda 1e-3 --realizations 10 --seed 123 "
      "--format json";
  const std::string out1 = "/tmp/gradmix_accept_jobs1.json";
  const std::string out8 = "/tmp/gradmix_accept_jobs8.json";
  require(std::system((base + " --jobs 1 --out " + out1).c_str()) == 0,
          "bench --jobs 1 failed");
  require(std::system((base + " --jobs 8 --out " + out8).c_str()) == 0,
          "bench --jobs 8 failed");
  const std::string a = read_file(out1);
  const std::string b = read_file(out8);
  require(!a.empty() && a == b, "reports differ between --jobs 1 and --jobs 8");
  std::remove(out1.c_str());
  std::remove(out8.c_str());
}

void criterion10_normalization_ablation() {
  BenchmarkConfig cfg;
  cfg.sigma = 1e-2;
  cfg.seed = 1003;
  cfg.ladders = {{Scheme::Nmxfd, {8}},
                 {Scheme::MxfdRaw, {8}},
                 {Scheme::AvgCfd, {8}}};
  const auto report = run_benchmark(cfg, 2);
  const double nm = find_cell(report, "nmxfd", 8, 0).median_log10_eta;
  const double raw = find_cell(report, "mxfd_raw", 8, 0).median_log10_eta;
  const double avg = find_cell(report, "avg_cfd", 8, 0).median_log10_eta;
  require(nm < raw, "nmxfd median " + fmt(nm) +
                        " not below unnormalized median " + fmt(raw));
  require(nm < avg,
          "nmxfd median " + fmt(nm) + " not below raw-average median " + fmt(avg));
}

}  // namespace

int main(int argc, char** argv) {
  if (argc > 1) g_cli = argv[1];

  struct Criterion {
    int id;
    const char* name;
    std::function<void()> body;
  };
  const std::vector<Criterion> criteria = {
      {1, "coefficient correctness", criterion1_coefficients},
      {2, "nmxfd(m=1) equals cfd", criterion2_cfd_equivalence},
      {3, "deterministic error bound on the cubic family",
       criterion3_cubic_error_bound},
      {4, "trapezoid error falls 4x per doubling of m", criterion4_trapezoid_rate},
      {5, "smoothing gap bound at n=2", criterion5_smoothing_gap},
      {6, "noise variance formulas", criterion6_variance},
      {7, "noise-free benchmark trend", criterion7_noise_free_trend},
      {8, "noisy benchmark trend", criterion8_noisy_trend},
      {9, "benchmark determinism across jobs", criterion9_determinism},
      {10, "normalization ablation", criterion10_normalization_ablation},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      c.body();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const double secs =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
            .count();
    if (error.empty()) {
      std::printf("PASS %2d: %s (%.2f s)\n", c.id, c.name, secs);
    } else {
      ++failures;
      std::printf("FAIL %2d: %s (%.2f s)\n        %s\n", c.id, c.name, secs,
                  error.c_str());
    }
    std::fflush(stdout);
  }
  return failures;
}
