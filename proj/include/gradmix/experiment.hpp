#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gradmix/estimators.hpp"
#include "gradmix/testfns.hpp"

namespace gradmix {

// --------------------------------------------------------------------------
// trajectory generation and bucket extraction
// --------------------------------------------------------------------------

struct Trajectory {
  std::vector<Point> points;  // x^0 .. x^K
  bool truncated = false;     // line search gave up before convergence
};

// BFGS with the inverse-Hessian update and an Armijo backtracking line
// search. Requires an analytic gradient. Terminates when
// ||grad f|| <= grad_tol * (1 + ||grad f(x0)||) or max_iter is reached; a
// failed line search returns the trajectory so far with `truncated` set.
Trajectory bfgs_minimize(const Objective& f, Point x0, double grad_tol,
                         int max_iter);

struct BucketPoint {
  std::size_t iterate = 0;  // index into the trajectory
  Point x;
  double grad_ratio = 0.0;  // ||grad f(x)|| / ||grad f(x0)||
};

// one bucket per threshold alpha: the first iterate whose gradient-norm
// ratio falls to alpha or below, absent when the trajectory never gets there
struct BucketSet {
  std::string function;
  std::vector<double> alphas;
  std::vector<std::optional<BucketPoint>> points;
};

// 10^0 .. 10^-6
std::vector<double> default_alphas();

// Throws std::invalid_argument when the initial gradient vanishes (the
// ratio is undefined and the function must be excluded).
BucketSet extract_buckets(const Trajectory& trajectory, const Objective& f,
                          std::span<const double> alphas);

// ||g - grad_true|| / ||grad_true||; rejects a zero true gradient.
double relative_error(std::span<const double> g,
                      std::span<const double> grad_true);

// --------------------------------------------------------------------------
// benchmark harness
// --------------------------------------------------------------------------

// One table row group: a scheme and its ladder of evaluation budgets. The
// multiplier k encodes N as a function of the dimension n:
//   ffd: N = n+1 and cfd: N = 2n (k ignored, one row each)
//   gsg: M = k*n, N = k*n + 1
//   cgsg: M = k*n/2, N = k*n          (k even)
//   nmxfd / mxfd_raw / avg_cfd: m = k/2, N = k*n   (k even)
struct SchemeLadder {
  Scheme scheme = Scheme::Nmxfd;
  std::vector<int> multipliers;
};

std::vector<SchemeLadder> default_ladders_noise_free();
std::vector<SchemeLadder> default_ladders_noisy();

struct BenchmarkConfig {
  std::vector<SchemeLadder> ladders;  // empty: defaults for the run mode
  std::vector<std::string> suite;     // empty: whole registry
  double sigma = 1e-2;
  double S = 3.0;     // truncation half-width of the mixed schemes, h = S/m
  double fd_h = 1.0;  // h of ffd/cfd (effective step sigma*fd_h)
  double lambda = 1e-3;   // noisy runs only
  int realizations = 100; // noisy runs only
  std::uint64_t seed = 0;
  // base of the noise substreams; defaults to `seed` when unset
  std::optional<std::uint64_t> noise_seed;
  double start_perturbation = 0.0;  // seeded N(0,1) offset scale on x^0
  double bfgs_grad_tol = 1e-9;
  int bfgs_max_iter = 600;
  double eta_floor = 1e-16;  // clamp before taking log10
};

struct ReportCell {
  std::string scheme;
  std::string n_label;  // "n+1", "2n", "8n+1", ...
  int multiplier = 0;
  int bucket = 0;
  double median_log10_eta = 0.0;  // NaN when no function contributed
  int sample_count = 0;
  int failure_count = 0;

  bool operator==(const ReportCell& other) const;
};

struct BenchmarkReport {
  BenchmarkConfig config;  // resolved echo (ladders and suite filled in)
  bool noisy = false;
  std::vector<std::string> exclusions;  // functions dropped, with reasons
  std::vector<ReportCell> cells;        // ladder order x multiplier x bucket

  bool operator==(const BenchmarkReport& other) const;
};

// Noise-free protocol: one estimate per (function, bucket, scheme, N) cell
// against the analytic gradient, then the per-cell median of log10 eta
// across functions. Deterministic for any jobs count: every substream is
// keyed by (seed, function, bucket, scheme, multiplier, trial).
BenchmarkReport run_benchmark(const BenchmarkConfig& config, int jobs = 1);

// Noisy protocol: eta per point is the mean of `realizations` relative
// errors under independent noise seeds.
BenchmarkReport run_noisy_benchmark(const BenchmarkConfig& config,
                                    int jobs = 1);

struct VarianceExperiment {
  double empirical = 0.0;    // sample trace of covariance of the noise error
  double theoretical = 0.0;  // closed-form value
  long trials = 0;
};

// Runs `scheme` under additive noise `trials` times, subtracts the
// noise-free estimate, and reports the sample trace-of-covariance next to
// the closed-form variance. Supported schemes: cfd, nmxfd, mxfd_raw,
// avg_cfd (the ones with a weights-based variance formula).
VarianceExperiment variance_experiment(Scheme scheme, const Objective& f,
                                       std::span<const double> x, double sigma,
                                       double h, int m, double lambda,
                                       long trials, std::uint64_t seed);

enum class TableFormat { Csv, Json, Markdown };

std::optional<TableFormat> table_format_from_name(std::string_view name);

// markdown: scheme x N rows, B0..B6 columns, two decimals; csv and json
// carry full precision plus the config metadata. JSON round-trips through
// parse_report_json.
std::string emit_table(const BenchmarkReport& report, TableFormat format);

BenchmarkReport parse_report_json(const std::string& text);

}  // namespace gradmix
