#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <stdexcept>
#include <thread>

#include "gradmix/coefficients.hpp"
#include "gradmix/experiment.hpp"
#include "gradmix/noise.hpp"
#include "gradmix/oracles.hpp"
#include "gradmix/rng.hpp"

namespace gradmix {

namespace {

// substream tags; every random draw in the harness is keyed by
// (base seed, function-name hash, bucket, scheme, multiplier, trial, tag)
constexpr std::uint64_t kTagStart = 0x57A7;
constexpr std::uint64_t kTagDirections = 0xD185;
constexpr std::uint64_t kTagNoise = 0x4015;

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& body) {
  if (jobs <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  const std::size_t nthreads =
      std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
  std::vector<std::thread> pool;
  pool.reserve(nthreads);
  for (std::size_t t = 0; t < nthreads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        try {
          body(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

bool is_mixed(Scheme s) {
  return s == Scheme::Nmxfd || s == Scheme::MxfdRaw || s == Scheme::AvgCfd;
}

std::string n_label_for(Scheme scheme, int k) {
  switch (scheme) {
    case Scheme::Ffd: return "n+1";
    case Scheme::Cfd: return "2n";
    case Scheme::Gsg: return std::to_string(k) + "n+1";
    default: return std::to_string(k) + "n";
  }
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t mid = v.size() / 2;
  return v.size() % 2 == 1 ? v[mid] : 0.5 * (v[mid - 1] + v[mid]);
}

struct FunctionData {
  Objective obj;
  std::optional<BucketSet> buckets;
  std::string exclusion;
};

struct Row {
  std::size_t ladder = 0;
  int multiplier = 0;
};

BenchmarkConfig resolve_config(BenchmarkConfig cfg, bool noisy) {
  if (cfg.ladders.empty()) {
    cfg.ladders = noisy ? default_ladders_noisy() : default_ladders_noise_free();
  }
  if (cfg.suite.empty()) cfg.suite = objective_names();
  if (!cfg.noise_seed) cfg.noise_seed = cfg.seed;
  if (!noisy) {
    cfg.lambda = 0.0;
    cfg.realizations = 1;
  }
  if (!(cfg.sigma > 0.0)) {
    throw std::invalid_argument("benchmark: sigma must be > 0");
  }
  if (!(cfg.S > 0.0) || !(cfg.fd_h > 0.0)) {
    throw std::invalid_argument("benchmark: S and h must be > 0");
  }
  if (cfg.realizations < 1) {
    throw std::invalid_argument("benchmark: realizations must be >= 1");
  }
  if (!(cfg.lambda >= 0.0)) {
    throw std::invalid_argument("benchmark: lambda must be >= 0");
  }
  for (auto& ladder : cfg.ladders) {
    // single-budget schemes collapse to their fixed row
    if (ladder.scheme == Scheme::Ffd) ladder.multipliers = {1};
    if (ladder.scheme == Scheme::Cfd) ladder.multipliers = {2};
    if (ladder.multipliers.empty()) {
      throw std::invalid_argument("benchmark: empty multiplier ladder");
    }
    for (int k : ladder.multipliers) {
      if (k < 1) throw std::invalid_argument("benchmark: multiplier must be >= 1");
      if ((ladder.scheme == Scheme::Cgsg || is_mixed(ladder.scheme)) &&
          k % 2 != 0) {
        throw std::invalid_argument(
            "benchmark: cgsg and the mixed schemes need an even N/n multiplier");
      }
    }
  }
  return cfg;
}

Estimator make_estimator(const BenchmarkConfig& cfg, Scheme scheme, int k,
                         int n) {
  EstimatorConfig ec;
  ec.scheme = scheme;
  ec.sigma = cfg.sigma;
  switch (scheme) {
    case Scheme::Ffd:
    case Scheme::Cfd:
      ec.h = cfg.fd_h;
      break;
    case Scheme::Gsg:
      ec.M = k * n;
      break;
    case Scheme::Cgsg:
      ec.M = k * n / 2;
      break;
    default:  // mixed family
      ec.m = k / 2;
      ec.S = cfg.S;
      break;
  }
  return Estimator(ec);
}

BenchmarkReport run_engine(const BenchmarkConfig& raw, int jobs, bool noisy) {
  const BenchmarkConfig cfg = resolve_config(raw, noisy);

  // phase 1: trajectories and buckets
  std::vector<FunctionData> fns(cfg.suite.size());
  parallel_for(cfg.suite.size(), jobs, [&](std::size_t fi) {
    FunctionData& fd = fns[fi];
    fd.obj = find_objective(cfg.suite[fi]);
    Point x0 = fd.obj.start;
    if (cfg.start_perturbation > 0.0) {
      NormalStream stream(
          derive_seed(cfg.seed, {fnv1a64(fd.obj.name), kTagStart}));
      for (double& v : x0) v += cfg.start_perturbation * stream.next();
    }
    try {
      const Trajectory traj =
          bfgs_minimize(fd.obj, x0, cfg.bfgs_grad_tol, cfg.bfgs_max_iter);
      const auto alphas = default_alphas();
      fd.buckets = extract_buckets(traj, fd.obj, alphas);
    } catch (const std::exception& e) {
      fd.exclusion = e.what();
    }
  });

  const std::size_t n_buckets = default_alphas().size();

  std::vector<Row> rows;
  for (std::size_t li = 0; li < cfg.ladders.size(); ++li) {
    for (int k : cfg.ladders[li].multipliers) rows.push_back({li, k});
  }

  // status per (row, function, bucket): 0 absent, 1 ok, 2 failed
  struct PointResult {
    double value = 0.0;
    int status = 0;
  };
  std::vector<PointResult> results(rows.size() * fns.size() * n_buckets);

  parallel_for(rows.size() * fns.size(), jobs, [&](std::size_t task) {
    const std::size_t ri = task / fns.size();
    const std::size_t fi = task % fns.size();
    const FunctionData& fd = fns[fi];
    if (!fd.buckets) return;
    const Row& row = rows[ri];
    const Scheme scheme = cfg.ladders[row.ladder].scheme;
    const Estimator estimator =
        make_estimator(cfg, scheme, row.multiplier, fd.obj.dim);
    const std::uint64_t fn_hash = fnv1a64(fd.obj.name);

    for (std::size_t b = 0; b < n_buckets; ++b) {
      PointResult& pr = results[(ri * fns.size() + fi) * n_buckets + b];
      const auto& bp = fd.buckets->points[b];
      if (!bp) continue;
      try {
        const Point grad_true = fd.obj.grad(bp->x);
        double eta_acc = 0.0;
        for (int r = 0; r < cfg.realizations; ++r) {
          const std::uint64_t dir_seed = derive_seed(
              cfg.seed, {fn_hash, b, static_cast<std::uint64_t>(scheme),
                         static_cast<std::uint64_t>(row.multiplier),
                         static_cast<std::uint64_t>(r), kTagDirections});
          EvalFn f = fd.obj.eval;
          if (cfg.lambda > 0.0) {
            const std::uint64_t noise_seed = derive_seed(
                *cfg.noise_seed,
                {fn_hash, b, static_cast<std::uint64_t>(scheme),
                           static_cast<std::uint64_t>(row.multiplier),
                           static_cast<std::uint64_t>(r), kTagNoise});
            f = noisy_wrap(std::move(f), NoiseSpec{cfg.lambda, noise_seed});
          }
          const GradientEstimate est = estimator.estimate(f, bp->x, dir_seed);
          eta_acc += relative_error(est.gradient, grad_true);
        }
        const double eta = eta_acc / cfg.realizations;
        pr.value = std::log10(std::max(eta, cfg.eta_floor));
        pr.status = 1;
      } catch (const std::exception&) {
        pr.status = 2;
      }
    }
  });

  // phase 3: deterministic reduce
  BenchmarkReport report;
  report.config = cfg;
  report.noisy = noisy;
  for (const FunctionData& fd : fns) {
    if (!fd.exclusion.empty()) report.exclusions.push_back(fd.exclusion);
  }
  for (std::size_t ri = 0; ri < rows.size(); ++ri) {
    const Scheme scheme = cfg.ladders[rows[ri].ladder].scheme;
    for (std::size_t b = 0; b < n_buckets; ++b) {
      ReportCell cell;
      cell.scheme = scheme_name(scheme);
      cell.n_label = n_label_for(scheme, rows[ri].multiplier);
      cell.multiplier = rows[ri].multiplier;
      cell.bucket = static_cast<int>(b);
      std::vector<double> values;
      for (std::size_t fi = 0; fi < fns.size(); ++fi) {
        const PointResult& pr = results[(ri * fns.size() + fi) * n_buckets + b];
        if (pr.status == 1) values.push_back(pr.value);
        if (pr.status == 2) ++cell.failure_count;
      }
      cell.sample_count = static_cast<int>(values.size());
      cell.median_log10_eta = median(std::move(values));
      report.cells.push_back(std::move(cell));
    }
  }
  return report;
}

}  // namespace

std::vector<SchemeLadder> default_ladders_noise_free() {
  return {{Scheme::Ffd, {1}},
          {Scheme::Cfd, {2}},
          {Scheme::Gsg, {2, 4, 8}},
          {Scheme::Cgsg, {2, 4, 8}},
          {Scheme::Nmxfd, {2, 4, 8}}};
}

std::vector<SchemeLadder> default_ladders_noisy() {
  return {{Scheme::Ffd, {1}},
          {Scheme::Cfd, {2}},
          {Scheme::Gsg, {4, 8, 12}},
          {Scheme::Cgsg, {4, 8, 12}},
          {Scheme::Nmxfd, {4, 8, 12}}};
}

BenchmarkReport run_benchmark(const BenchmarkConfig& config, int jobs) {
  return run_engine(config, jobs, /*noisy=*/false);
}

BenchmarkReport run_noisy_benchmark(const BenchmarkConfig& config, int jobs) {
  return run_engine(config, jobs, /*noisy=*/true);
}

VarianceExperiment variance_experiment(Scheme scheme, const Objective& f,
                                       std::span<const double> x, double sigma,
                                       double h, int m, double lambda,
                                       long trials, std::uint64_t seed) {
  if (trials < 2) {
    throw std::invalid_argument("variance_experiment: trials must be >= 2");
  }
  const int n = static_cast<int>(x.size());

  // closed-form trace of covariance for the weights-based schemes
  double theoretical = 0.0;
  switch (scheme) {
    case Scheme::Cfd:
      theoretical = variance_cfd(n, lambda, sigma, h);
      break;
    case Scheme::Nmxfd:
      theoretical = variance_nmxfd(n, lambda, sigma, h, m);
      break;
    case Scheme::MxfdRaw: {
      const CoefficientTable table = mixing_coefficients(m, h);
      double s = 0.0;
      for (int j = 1; j <= m; ++j) {
        const double w = table.raw[j - 1];
        s += w * w / (static_cast<double>(j) * j);
      }
      theoretical = variance_cfd(n, lambda, sigma, h) * s;
      break;
    }
    case Scheme::AvgCfd: {
      double s = 0.0;
      for (int j = 1; j <= m; ++j) {
        s += 1.0 / (static_cast<double>(m) * m * j * j);
      }
      theoretical = variance_cfd(n, lambda, sigma, h) * s;
      break;
    }
    default:
      throw std::invalid_argument(
          "variance_experiment: no closed-form variance for scheme " +
          std::string(scheme_name(scheme)));
  }

  EstimatorConfig ec;
  ec.scheme = scheme;
  ec.sigma = sigma;
  ec.m = m;
  ec.h = h;
  const Estimator estimator(ec);

  const GradientEstimate clean = estimator.estimate(f.eval, x);

  // Welford per component; empirical value is sum of component variances
  std::vector<double> mean(n, 0.0);
  std::vector<double> m2(n, 0.0);
  for (long t = 0; t < trials; ++t) {
    const std::uint64_t noise_seed =
        derive_seed(seed, {static_cast<std::uint64_t>(t), kTagNoise});
    const EvalFn noisy = noisy_wrap(f.eval, NoiseSpec{lambda, noise_seed});
    const GradientEstimate est = estimator.estimate(noisy, x);
    for (int i = 0; i < n; ++i) {
      const double e = est.gradient[i] - clean.gradient[i];
      const double delta = e - mean[i];
      mean[i] += delta / (t + 1);
      m2[i] += delta * (e - mean[i]);
    }
  }
  VarianceExperiment out;
  out.trials = trials;
  out.theoretical = theoretical;
  for (int i = 0; i < n; ++i) out.empirical += m2[i] / (trials - 1);
  return out;
}

}  // namespace gradmix
