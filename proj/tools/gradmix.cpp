// gradmix: gradient-estimation toolbox CLI.
//
// Subcommands: coeffs, estimate, bounds, buckets, bench, variance, fns.
// JSON on stdout is the canonical output (csv/markdown are renderings of
// it); every run echoes its resolved configuration so results are
// reproducible from the output alone.

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gradmix/coefficients.hpp"
#include "gradmix/estimators.hpp"
#include "gradmix/experiment.hpp"
#include "gradmix/kernels.hpp"
#include "gradmix/noise.hpp"
#include "gradmix/oracles.hpp"
#include "gradmix/rng.hpp"
#include "gradmix/testfns.hpp"

using nlohmann::json;

namespace {

std::vector<double> parse_reals(const std::string& csv, const char* flag) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= csv.size()) {
    const std::size_t comma = std::min(csv.find(',', pos), csv.size());
    const std::string tok = csv.substr(pos, comma - pos);
    std::size_t used = 0;
    double v = 0.0;
    bool ok = !tok.empty();
    if (ok) {
      try {
        v = std::stod(tok, &used);
      } catch (const std::exception&) {
        ok = false;
      }
    }
    if (!ok || used != tok.size()) {
      throw CLI::ValidationError(
          flag, "expected comma-separated reals, got '" + csv + "'");
    }
    out.push_back(v);
    pos = comma + 1;
    if (comma == csv.size()) break;
  }
  if (out.empty()) throw CLI::ValidationError(flag, "empty list");
  return out;
}

std::vector<std::string> split_names(const std::string& csv) {
  std::vector<std::string> out;
  std::stringstream ss(csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) {
    if (!tok.empty()) out.push_back(tok);
  }
  return out;
}

void write_output(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::cout << text;
    return;
  }
  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open output file " + out_path);
  out << text;
}

json vec_to_json(std::span<const double> v) {
  return json(std::vector<double>(v.begin(), v.end()));
}

// Flat key=value overlay: each pair becomes a "--key value" token pair in
// front of the user's own flags, so the command line takes precedence.
std::vector<std::string> config_tokens(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  std::vector<std::string> tokens;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) continue;
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) continue;
    if (value == "true" || value == "on" || value == "yes") {
      tokens.push_back("--" + key);
    } else {
      tokens.push_back("--" + key);
      tokens.push_back(value);
    }
  }
  return tokens;
}

gradmix::Scheme parse_scheme(const std::string& name) {
  const auto s = gradmix::scheme_from_name(name);
  if (!s) {
    throw CLI::ValidationError("--scheme", "unknown scheme '" + name + "'");
  }
  return *s;
}

json bound_row(const char* name, const gradmix::BoundReport& r) {
  return json{{"name", name},
              {"bound", r.bound},
              {"observed", r.observed},
              {"satisfied", r.satisfied}};
}

struct EstimateArgs {
  std::string fn;
  std::string x_csv;
  std::string scheme = "nmxfd";
  double sigma = 1e-2;
  int m = 1;
  double h = 0.0;  // 0: unset
  double S = 0.0;
  int M = 0;
  std::uint64_t seed = 0;
  double lambda = 0.0;
  std::uint64_t noise_seed = 0;
};

void run_estimate(const EstimateArgs& a) {
  const std::vector<double> x = parse_reals(a.x_csv, "--x");
  const gradmix::Objective obj =
      gradmix::find_objective(a.fn, static_cast<int>(x.size()));

  gradmix::EstimatorConfig ec;
  ec.scheme = parse_scheme(a.scheme);
  ec.sigma = a.sigma;
  ec.m = a.m;
  if (a.h > 0.0) ec.h = a.h;
  if (a.S > 0.0) ec.S = a.S;
  ec.M = a.M > 0 ? a.M : 2 * static_cast<int>(x.size());
  ec.seed = a.seed;
  const gradmix::Estimator estimator(ec);

  gradmix::EvalFn f = obj.eval;
  if (a.lambda > 0.0) {
    f = gradmix::noisy_wrap(std::move(f),
                            gradmix::NoiseSpec{a.lambda, a.noise_seed});
  }
  const gradmix::GradientEstimate est = estimator.estimate(f, x);

  json j;
  j["kind"] = "gradient_estimate";
  j["fn"] = obj.name;
  j["x"] = vec_to_json(x);
  j["config"] = {{"scheme", gradmix::scheme_name(estimator.scheme())},
                 {"sigma", estimator.sigma()},
                 {"m", estimator.m()},
                 {"h", estimator.h()},
                 {"S", estimator.S()},
                 {"M", estimator.M()},
                 {"seed", a.seed},
                 {"lambda", a.lambda},
                 {"noise_seed", a.noise_seed}};
  j["estimate"] = vec_to_json(est.gradient);
  j["evals"] = est.evals;
  if (obj.has_grad()) {
    const auto g = obj.grad(x);
    j["true_gradient"] = vec_to_json(g);
    double norm = 0.0;
    for (double v : g) norm += v * v;
    j["eta"] = norm > 0.0
                   ? json(gradmix::relative_error(est.gradient, g))
                   : json(nullptr);
  } else {
    j["true_gradient"] = nullptr;
    j["eta"] = nullptr;
  }
  std::cout << j.dump(2) << "\n";
}

struct BoundsArgs {
  std::string fn;
  std::string x_csv;
  double sigma = 1e-2;
  int m = 1;
  double h = 0.0;
  double S = 0.0;
  double lambda = 0.0;
  std::uint64_t seed = 0;
};

void run_bounds(const BoundsArgs& a) {
  const std::vector<double> x = parse_reals(a.x_csv, "--x");
  const gradmix::Objective obj =
      gradmix::find_objective(a.fn, static_cast<int>(x.size()));
  if (!obj.has_grad()) {
    throw std::runtime_error("bounds: objective '" + obj.name +
                             "' has no analytic gradient");
  }
  const int n = static_cast<int>(x.size());

  gradmix::EstimatorConfig ec;
  ec.scheme = gradmix::Scheme::Nmxfd;
  ec.sigma = a.sigma;
  ec.m = a.m;
  if (a.h > 0.0) ec.h = a.h;
  if (a.S > 0.0) ec.S = a.S;
  const gradmix::Estimator estimator(ec);

  double H;
  const char* h_source;
  if (obj.lipschitz_hess) {
    H = *obj.lipschitz_hess;
    h_source = "declared";
  } else {
    const gradmix::Point lo(n, obj.box[0]);
    const gradmix::Point hi(n, obj.box[1]);
    H = gradmix::estimate_lipschitz_hess(obj.eval, lo, hi, 20, a.seed);
    h_source = "estimated";
  }

  const gradmix::Point g_true = obj.grad(x);
  const gradmix::GradientEstimate est = estimator.estimate(obj.eval, x);
  double err2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = est.gradient[i] - g_true[i];
    err2 += d * d;
  }

  json rows = json::array();
  rows.push_back(bound_row(
      "nmxfd_error",
      gradmix::make_bound_report(
          gradmix::nmxfd_error_bound(H, a.sigma, estimator.S(), n),
          std::sqrt(err2))));

  for (int jstep = 1; jstep <= estimator.m(); ++jstep) {
    const gradmix::GradientEstimate cd =
        gradmix::cfd(obj.eval, x, a.sigma, jstep * estimator.h());
    double worst = 0.0;
    for (int i = 0; i < n; ++i) {
      worst = std::max(worst, std::fabs(cd.gradient[i] - g_true[i]));
    }
    const auto r = gradmix::make_bound_report(
        gradmix::cfd_error_bound(H, a.sigma, estimator.h(), jstep), worst);
    rows.push_back(bound_row(("cfd_term_j" + std::to_string(jstep)).c_str(), r));
  }

  if (a.lambda > 0.0) {
    rows.push_back(bound_row(
        "variance_nmxfd_below_cfd",
        gradmix::make_bound_report(
            gradmix::variance_cfd(n, a.lambda, a.sigma, estimator.h()),
            gradmix::variance_nmxfd(n, a.lambda, a.sigma, estimator.h(),
                                    estimator.m()))));
  }

  json j;
  j["kind"] = "bound_report";
  j["fn"] = obj.name;
  j["x"] = vec_to_json(x);
  j["sigma"] = a.sigma;
  j["m"] = estimator.m();
  j["h"] = estimator.h();
  j["S"] = estimator.S();
  j["lambda"] = a.lambda;
  j["H"] = H;
  j["H_source"] = h_source;
  j["rows"] = std::move(rows);
  std::cout << j.dump(2) << "\n";
}

struct BucketsArgs {
  std::string fn;
  int dim = 0;
  std::uint64_t seed = 0;
  double perturb = 0.0;
  double grad_tol = 1e-9;
  int max_iter = 600;
};

void run_buckets(const BucketsArgs& a) {
  const gradmix::Objective obj = gradmix::find_objective(a.fn, a.dim);
  gradmix::Point x0 = obj.start;
  if (a.perturb > 0.0) {
    gradmix::NormalStream stream(
        gradmix::derive_seed(a.seed, {gradmix::fnv1a64(obj.name), 0x57A7}));
    for (double& v : x0) v += a.perturb * stream.next();
  }
  const gradmix::Trajectory traj =
      gradmix::bfgs_minimize(obj, x0, a.grad_tol, a.max_iter);
  const auto alphas = gradmix::default_alphas();
  const gradmix::BucketSet buckets =
      gradmix::extract_buckets(traj, obj, alphas);

  json jbuckets = json::array();
  for (std::size_t b = 0; b < buckets.alphas.size(); ++b) {
    json row;
    row["alpha"] = buckets.alphas[b];
    if (buckets.points[b]) {
      row["present"] = true;
      row["iterate"] = buckets.points[b]->iterate;
      row["grad_ratio"] = buckets.points[b]->grad_ratio;
      row["x"] = vec_to_json(buckets.points[b]->x);
    } else {
      row["present"] = false;
    }
    jbuckets.push_back(std::move(row));
  }
  json j;
  j["kind"] = "bucket_set";
  j["function"] = buckets.function;
  j["iterations"] = traj.points.size() - 1;
  j["truncated"] = traj.truncated;
  j["seed"] = a.seed;
  j["perturb"] = a.perturb;
  j["grad_tol"] = a.grad_tol;
  j["max_iter"] = a.max_iter;
  j["buckets"] = std::move(jbuckets);
  std::cout << j.dump(2) << "\n";
}

struct BenchArgs {
  double sigma = 1e-2;
  double lambda = 0.0;
  int realizations = 100;
  std::string schemes;
  std::string multipliers;
  std::string suite = "all";
  std::uint64_t seed = 0;
  long long noise_seed = -1;  // <0: follow --seed
  std::string out;
  std::string format = "json";
  int jobs = 0;
  double S = 3.0;
  double fd_h = 1.0;
  double perturb = 0.0;
  bool strict = false;
};

void run_bench(const BenchArgs& a) {
  const auto format = gradmix::table_format_from_name(a.format);
  if (!format) {
    throw CLI::ValidationError("--format", "expected csv, json or markdown");
  }

  gradmix::BenchmarkConfig cfg;
  cfg.sigma = a.sigma;
  cfg.lambda = a.lambda;
  cfg.realizations = a.realizations;
  cfg.seed = a.seed;
  if (a.noise_seed >= 0) {
    cfg.noise_seed = static_cast<std::uint64_t>(a.noise_seed);
  }
  cfg.S = a.S;
  cfg.fd_h = a.fd_h;
  cfg.start_perturbation = a.perturb;
  const bool noisy = a.lambda > 0.0;

  if (a.suite != "all" && !a.suite.empty()) cfg.suite = split_names(a.suite);
  if (!a.schemes.empty()) {
    const auto defaults = noisy ? gradmix::default_ladders_noisy()
                                : gradmix::default_ladders_noise_free();
    for (const std::string& name : split_names(a.schemes)) {
      const auto scheme = gradmix::scheme_from_name(name);
      if (!scheme) {
        throw CLI::ValidationError("--schemes", "unknown scheme '" + name + "'");
      }
      gradmix::SchemeLadder ladder{*scheme, {}};
      for (const auto& d : defaults) {
        if (d.scheme == *scheme) ladder.multipliers = d.multipliers;
      }
      if (ladder.multipliers.empty()) {
        ladder.multipliers = noisy ? std::vector<int>{4, 8, 12}
                                   : std::vector<int>{2, 4, 8};
      }
      if (!a.multipliers.empty()) {
        ladder.multipliers.clear();
        for (const std::string& tok : split_names(a.multipliers)) {
          ladder.multipliers.push_back(std::stoi(tok));
        }
      }
      cfg.ladders.push_back(std::move(ladder));
    }
  }

  const int jobs = a.jobs > 0
                       ? a.jobs
                       : static_cast<int>(
                             std::max(1u, std::thread::hardware_concurrency()));
  const gradmix::BenchmarkReport report =
      noisy ? gradmix::run_noisy_benchmark(cfg, jobs)
            : gradmix::run_benchmark(cfg, jobs);

  write_output(gradmix::emit_table(report, *format), a.out);

  if (a.strict) {
    long failures = 0;
    for (const auto& cell : report.cells) failures += cell.failure_count;
    if (failures > 0 || !report.exclusions.empty()) {
      std::cerr << "bench --strict: " << failures << " cell failure(s), "
                << report.exclusions.size() << " exclusion(s)\n";
      for (const auto& e : report.exclusions) std::cerr << "  " << e << "\n";
      std::exit(1);
    }
  }
}

struct VarianceArgs {
  std::string scheme = "nmxfd";
  std::string fn;
  std::string x_csv;
  double sigma = 1e-2;
  double h = 1.0;
  int m = 1;
  double lambda = 1e-3;
  long trials = 100000;
  std::uint64_t seed = 0;
};

void run_variance(const VarianceArgs& a) {
  gradmix::Objective obj =
      a.x_csv.empty()
          ? gradmix::find_objective(a.fn)
          : gradmix::find_objective(
                a.fn, static_cast<int>(parse_reals(a.x_csv, "--x").size()));
  const std::vector<double> x =
      a.x_csv.empty() ? obj.start : parse_reals(a.x_csv, "--x");

  const gradmix::VarianceExperiment ve = gradmix::variance_experiment(
      parse_scheme(a.scheme), obj, x, a.sigma, a.h, a.m, a.lambda, a.trials,
      a.seed);
  json j;
  j["kind"] = "variance_experiment";
  j["scheme"] = a.scheme;
  j["fn"] = obj.name;
  j["x"] = vec_to_json(x);
  j["sigma"] = a.sigma;
  j["h"] = a.h;
  j["m"] = a.m;
  j["lambda"] = a.lambda;
  j["trials"] = ve.trials;
  j["seed"] = a.seed;
  j["empirical"] = ve.empirical;
  j["theoretical"] = ve.theoretical;
  j["ratio"] = ve.theoretical > 0.0 ? json(ve.empirical / ve.theoretical)
                                    : json(nullptr);
  std::cout << j.dump(2) << "\n";
}

void run_fns_list() {
  json arr = json::array();
  for (const auto& obj : gradmix::registry()) {
    json row;
    row["name"] = obj.name;
    row["dim"] = obj.dim;
    row["L"] = obj.lipschitz_grad ? json(*obj.lipschitz_grad) : json(nullptr);
    row["H"] = obj.lipschitz_hess ? json(*obj.lipschitz_hess) : json(nullptr);
    row["start"] = vec_to_json(obj.start);
    row["box"] = {obj.box[0], obj.box[1]};
    arr.push_back(std::move(row));
  }
  json j;
  j["kind"] = "objective_list";
  j["objectives"] = std::move(arr);
  std::cout << j.dump(2) << "\n";
}

struct CoeffsArgs {
  int m = 1;
  double h = 1.0;
  std::string format = "json";
};

void run_coeffs(const CoeffsArgs& a) {
  const gradmix::CoefficientTable table = gradmix::mixing_coefficients(a.m, a.h);
  if (a.format == "csv") {
    char head[128];
    std::snprintf(head, sizeof(head), "# m=%d h=%.17g total=%.17g", a.m, a.h,
                  table.total);
    std::string out = head;
    out += "\nj,raw,normalized\n";
    for (int j = 1; j <= a.m; ++j) {
      char line[160];
      std::snprintf(line, sizeof(line), "%d,%.17g,%.17g\n", j,
                    table.raw[j - 1], table.normalized[j - 1]);
      out += line;
    }
    std::cout << out;
    return;
  }
  json j;
  j["kind"] = "coefficients";
  j["m"] = table.m;
  j["h"] = table.h;
  j["raw"] = table.raw;
  j["total"] = table.total;
  j["normalized"] = table.normalized;
  std::cout << j.dump(2) << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "gradmix: gradient estimation via normalized mixed finite differences "
      "(NMXFD) and reference schemes, with noise modeling, theoretical "
      "bounds, and a bucket-based benchmark harness"};
  app.require_subcommand(1);
  app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  // --h is a real flag here (the quadrature step), so help is --help only
  app.set_help_flag("--help", "print help and exit");

  auto add_subcommand = [&app](const char* name, const char* desc) {
    CLI::App* sub = app.add_subcommand(name, desc);
    sub->set_help_flag("--help", "print help and exit");
    return sub;
  };

  // ---- coeffs ----
  CoeffsArgs coeffs_args;
  auto* coeffs =
      add_subcommand("coeffs", "print the trapezoidal mixing weights a'_j, C, a_j");
  coeffs->add_option("--m", coeffs_args.m, "number of central differences (m)")
      ->required()
      ->check(CLI::PositiveNumber);
  coeffs->add_option("--h", coeffs_args.h, "quadrature step (h)")->required();
  coeffs->add_option("--format", coeffs_args.format, "json or csv")
      ->check(CLI::IsMember({"json", "csv"}));
  coeffs->callback([&] { run_coeffs(coeffs_args); });

  // ---- estimate ----
  EstimateArgs est_args;
  auto* estimate = add_subcommand(
      "estimate", "estimate a gradient at a point with one scheme");
  estimate->add_option("--fn", est_args.fn, "objective name (see `fns list`)")
      ->required();
  estimate->add_option("--x", est_args.x_csv, "evaluation point, comma-separated reals")
      ->required();
  estimate
      ->add_option("--scheme", est_args.scheme,
                   "ffd|cfd|gsg|cgsg|nmxfd|mxfd_raw|avg_cfd")
      ->check(CLI::IsMember(
          {"ffd", "cfd", "gsg", "cgsg", "nmxfd", "mxfd_raw", "avg_cfd"}));
  estimate->add_option("--sigma", est_args.sigma, "smoothing scale (sigma)");
  estimate->add_option("--m", est_args.m, "mixed-difference count (m)");
  estimate->add_option("--h", est_args.h, "quadrature step (h); step of ffd/cfd is sigma*h");
  estimate->add_option("--S", est_args.S, "truncation half-width (S = m*h)");
  estimate->add_option("--M", est_args.M, "sampled directions for gsg/cgsg (M); default 2n");
  estimate->add_option("--seed", est_args.seed, "base seed for sampled directions")
      ->envname("GRADMIX_SEED");
  estimate->add_option("--lambda", est_args.lambda,
                       "additive noise standard deviation (lambda)");
  estimate->add_option("--noise-seed", est_args.noise_seed, "noise stream seed");
  estimate->callback([&] { run_estimate(est_args); });

  // ---- bounds ----
  BoundsArgs bounds_args;
  auto* bounds = add_subcommand(
      "bounds", "theoretical error/variance bounds next to observed values");
  bounds->add_option("--fn", bounds_args.fn, "objective name")->required();
  bounds->add_option("--x", bounds_args.x_csv, "evaluation point")->required();
  bounds->add_option("--sigma", bounds_args.sigma, "smoothing scale (sigma)");
  bounds->add_option("--m", bounds_args.m, "mixed-difference count (m)");
  bounds->add_option("--h", bounds_args.h, "quadrature step (h)");
  bounds->add_option("--S", bounds_args.S, "truncation half-width (S = m*h)");
  bounds->add_option("--lambda", bounds_args.lambda,
                     "noise level (lambda); adds the variance comparison row");
  bounds->add_option("--seed", bounds_args.seed,
                     "seed for the local smoothness-constant sampler")
      ->envname("GRADMIX_SEED");
  bounds->callback([&] { run_bounds(bounds_args); });

  // ---- buckets ----
  BucketsArgs buckets_args;
  auto* buckets = add_subcommand(
      "buckets",
      "BFGS trajectory buckets: first iterate per gradient-ratio threshold (alpha)");
  buckets->add_option("--fn", buckets_args.fn, "objective name")->required();
  buckets->add_option("--dim", buckets_args.dim,
                      "dimension override for flexible objectives");
  buckets->add_option("--seed", buckets_args.seed, "seed for the start perturbation")
      ->envname("GRADMIX_SEED");
  buckets->add_option("--perturb", buckets_args.perturb,
                      "scale of the seeded N(0,1) offset added to x0");
  buckets->add_option("--grad-tol", buckets_args.grad_tol,
                      "BFGS relative gradient tolerance");
  buckets->add_option("--max-iter", buckets_args.max_iter, "BFGS iteration cap");
  buckets->callback([&] { run_buckets(buckets_args); });

  // ---- bench ----
  BenchArgs bench_args;
  auto* bench = add_subcommand(
      "bench",
      "bucket benchmark: median log10 relative error per (scheme, N, bucket)");
  bench->add_option("--sigma", bench_args.sigma, "smoothing scale (sigma)");
  bench->add_option("--lambda", bench_args.lambda,
                    "noise level (lambda); > 0 switches to the noisy protocol");
  bench->add_option("--realizations", bench_args.realizations,
                    "noise realizations per point (R)");
  bench->add_option("--schemes", bench_args.schemes,
                    "comma list of schemes (default: ffd,cfd,gsg,cgsg,nmxfd)");
  bench->add_option("--multipliers", bench_args.multipliers,
                    "comma list of N/n multipliers overriding the default ladder");
  bench->add_option("--suite", bench_args.suite,
                    "comma list of objectives, or 'all'");
  bench->add_option("--seed", bench_args.seed, "base seed")
      ->envname("GRADMIX_SEED");
  bench->add_option("--noise-seed", bench_args.noise_seed,
                    "base of the noise substreams (default: --seed)");
  bench->add_option("--out", bench_args.out, "output path (default stdout)");
  bench->add_option("--format", bench_args.format, "csv|json|markdown")
      ->check(CLI::IsMember({"csv", "json", "markdown"}));
  bench->add_option("--jobs", bench_args.jobs,
                    "worker threads (default: available parallelism)");
  bench->add_option("--S", bench_args.S, "truncation half-width of the mixed schemes");
  bench->add_option("--h", bench_args.fd_h, "h of ffd/cfd (step sigma*h)");
  bench->add_option("--perturb", bench_args.perturb,
                    "scale of the seeded start perturbation");
  bench->add_flag("--strict", bench_args.strict,
                  "exit nonzero when any cell records a failure");
  bench->callback([&] { run_bench(bench_args); });

  // ---- variance ----
  VarianceArgs var_args;
  auto* variance = add_subcommand(
      "variance",
      "empirical noise variance of an estimator vs the closed-form value");
  variance->add_option("--scheme", var_args.scheme, "cfd|nmxfd|mxfd_raw|avg_cfd");
  variance->add_option("--fn", var_args.fn, "objective name")->required();
  variance->add_option("--x", var_args.x_csv,
                       "evaluation point (default: objective start)");
  variance->add_option("--sigma", var_args.sigma, "smoothing scale (sigma)");
  variance->add_option("--h", var_args.h, "quadrature step (h)");
  variance->add_option("--m", var_args.m, "mixed-difference count (m)");
  variance->add_option("--lambda", var_args.lambda, "noise level (lambda)");
  variance->add_option("--trials", var_args.trials, "Monte Carlo trials");
  variance->add_option("--seed", var_args.seed, "base seed")
      ->envname("GRADMIX_SEED");
  variance->callback([&] { run_variance(var_args); });

  // ---- fns ----
  auto* fns = add_subcommand("fns", "built-in objective registry");
  fns->require_subcommand(1);
  auto* fns_list = fns->add_subcommand("list", "names, dims, constants");
  fns_list->callback([&] { run_fns_list(); });

  // manual --config overlay (flat key=value, keys named exactly as flags);
  // precedence: command line > config file > environment > defaults
  std::vector<std::string> args(argv + 1, argv + argc);
  std::vector<std::string> rest;
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) {
      config_path = args[++i];
    } else if (args[i].rfind("--config=", 0) == 0) {
      config_path = args[i].substr(9);
    } else {
      rest.push_back(args[i]);
    }
  }
  try {
    if (!config_path.empty()) {
      const auto tokens = config_tokens(config_path);
      // insert right after the subcommand name so the user's own flags,
      // which come later, win under the TakeLast policy
      auto insert_at = rest.begin();
      for (auto it = rest.begin(); it != rest.end(); ++it) {
        if (!it->empty() && (*it)[0] != '-') {
          insert_at = it + 1;
          // `fns list` style nested subcommands
          if (insert_at != rest.end() && !insert_at->empty() &&
              (*insert_at)[0] != '-') {
            ++insert_at;
          }
          break;
        }
      }
      rest.insert(insert_at, tokens.begin(), tokens.end());
    }

    std::vector<const char*> cargv;
    cargv.push_back(argv[0]);
    for (const auto& s : rest) cargv.push_back(s.c_str());
    app.parse(static_cast<int>(cargv.size()), cargv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
