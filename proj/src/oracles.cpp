#include "gradmix/oracles.hpp"

#include <cmath>
#include <stdexcept>

#include "gradmix/coefficients.hpp"
#include "gradmix/kernels.hpp"
#include "gradmix/rng.hpp"

namespace gradmix {

namespace {

constexpr double kTruncation = 8.0;

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

}  // namespace

BoundReport make_bound_report(double bound, double observed) {
  BoundReport r;
  r.bound = bound;
  r.observed = observed;
  r.satisfied = observed <= bound * (1.0 + 1e-9);
  return r;
}

double filtered_derivative_oracle(const EvalFn& f, std::span<const double> x,
                                  int axis, double sigma, double S, double tol,
                                  long max_evals) {
  require(axis >= 0 && axis < static_cast<int>(x.size()),
          "filtered_derivative_oracle: axis out of range");
  require(sigma > 0.0, "filtered_derivative_oracle: sigma must be > 0");
  require(S > 0.0, "filtered_derivative_oracle: S must be > 0");
  require(tol > 0.0, "filtered_derivative_oracle: tol must be > 0");

  Point probe(x.begin(), x.end());
  const double xi = x[axis];
  auto integrand = [&](double s) {
    probe[axis] = xi + sigma * s;
    return f(probe) * s * gaussian_pdf(s);
  };
  const IntegrationResult r =
      integrate_adaptive(integrand, -S, S, tol * sigma, max_evals);
  return r.value / sigma;
}

namespace {

// iterated adaptive quadrature over [-8, 8]^n for one gradient component
class TensorIntegrator {
 public:
  TensorIntegrator(const EvalFn& f, std::span<const double> x, double sigma,
                   int component, double tol, long max_evals)
      : f_(f),
        x_(x.begin(), x.end()),
        probe_(x.begin(), x.end()),
        sigma_(sigma),
        component_(component),
        tol_(tol),
        max_evals_(max_evals) {}

  double run() {
    // outer level gets half the tolerance budget; each nesting level passes
    // a (range * 2)-diluted share down to its integrand
    return integrate_level(0, 0.5 * tol_);
  }

 private:
  double integrate_level(std::size_t level, double tol) {
    const double inner_tol =
        tol / (2.0 * 2.0 * kTruncation);  // per-node accuracy for the level below
    auto integrand = [&](double s) {
      probe_[level] = x_[level] + sigma_ * s;
      double v;
      if (level + 1 == x_.size()) {
        if (evals_ >= max_evals_) {
          throw QuadratureError(
              "smoothed_gradient_oracle: evaluation budget exhausted",
              IntegrationResult{0.0, 0.0, evals_});
        }
        ++evals_;
        v = f_(probe_);
        const double s_comp =
            (probe_[component_] - x_[component_]) / sigma_;
        v *= s_comp;
      } else {
        v = integrate_level(level + 1, inner_tol);
      }
      return v * gaussian_pdf(s);
    };
    return integrate_adaptive(integrand, -kTruncation, kTruncation, tol,
                              1'000'000'000L)
        .value;
  }

  const EvalFn& f_;
  Point x_;
  Point probe_;
  double sigma_;
  int component_;
  double tol_;
  long max_evals_;
  long evals_ = 0;
};

}  // namespace

SmoothedGradient smoothed_gradient_oracle(const EvalFn& f,
                                          std::span<const double> x,
                                          double sigma,
                                          const OracleAccuracy& accuracy) {
  require(sigma > 0.0, "smoothed_gradient_oracle: sigma must be > 0");
  require(!x.empty(), "smoothed_gradient_oracle: empty point");
  const std::size_t n = x.size();

  SmoothedGradient out;
  out.value.resize(n);

  if (accuracy.mode == OracleAccuracy::Mode::Tensor) {
    if (n > 3) {
      throw std::invalid_argument(
          "smoothed_gradient_oracle: tensor quadrature supports n <= 3; use "
          "Monte Carlo mode for larger dimensions");
    }
    for (std::size_t i = 0; i < n; ++i) {
      TensorIntegrator ti(f, x, sigma, static_cast<int>(i), accuracy.tol,
                          accuracy.max_evals);
      // the component factor s_i is applied inside; divide by sigma once
      out.value[i] = ti.run() / sigma;
    }
    return out;
  }

  // Monte Carlo: (1/M) sum (f(x + sigma s) - f(x)) s / sigma. Subtracting
  // f(x) leaves the mean unchanged (E[s] = 0) and shrinks the variance.
  const long M = accuracy.mc_samples;
  require(M >= 2, "smoothed_gradient_oracle: mc_samples must be >= 2");
  NormalStream stream(accuracy.seed);
  const double f0 = f(x);
  Point dir(n);
  Point probe(n);
  std::vector<double> mean(n, 0.0);
  std::vector<double> m2(n, 0.0);
  for (long k = 0; k < M; ++k) {
    stream.fill(dir);
    for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] + sigma * dir[i];
    const double w = (f(probe) - f0) / sigma;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = w * dir[i];
      const double delta = v - mean[i];
      mean[i] += delta / (k + 1);
      m2[i] += delta * (v - mean[i]);
    }
  }
  double var_of_mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.value[i] = mean[i];
    var_of_mean += m2[i] / (M - 1) / M;
  }
  out.std_error = std::sqrt(var_of_mean);
  return out;
}

double smoothing_gap_bound(double L, double sigma, int n) {
  require(L >= 0.0, "smoothing_gap_bound: L must be >= 0");
  require(sigma > 0.0, "smoothing_gap_bound: sigma must be > 0");
  require(n >= 1, "smoothing_gap_bound: n must be >= 1");
  return L * sigma * std::sqrt(n * (15.0 + 7.0 * (n - 1)));
}

double smoothing_error_bound_grad_lipschitz(double c_phi, double L,
                                            double sigma) {
  require(c_phi > 0.0, "smoothing_error_bound: c_phi must be > 0");
  require(L >= 0.0 && sigma >= 0.0, "smoothing_error_bound: bad arguments");
  return c_phi * L * sigma;
}

double smoothing_error_bound_hess_lipschitz(double c_phi, double H,
                                            double sigma) {
  require(c_phi > 0.0, "smoothing_error_bound: c_phi must be > 0");
  require(H >= 0.0 && sigma >= 0.0, "smoothing_error_bound: bad arguments");
  return c_phi * H * sigma * sigma;
}

double nmxfd_error_bound(double H, double sigma, double S, int n) {
  require(H >= 0.0, "nmxfd_error_bound: H must be >= 0");
  require(sigma >= 0.0, "nmxfd_error_bound: sigma must be >= 0");
  require(S > 0.0, "nmxfd_error_bound: S must be > 0");
  require(n >= 1, "nmxfd_error_bound: n must be >= 1");
  return std::sqrt(static_cast<double>(n)) * H * sigma * sigma * S * S / 6.0;
}

double cfd_error_bound(double H, double sigma, double h, int j) {
  require(H >= 0.0, "cfd_error_bound: H must be >= 0");
  require(j >= 1, "cfd_error_bound: j must be >= 1");
  const double t = j * h;
  return H * sigma * sigma * t * t / 6.0;
}

double variance_cfd(int n, double lambda, double sigma, double h) {
  require(n >= 1, "variance_cfd: n must be >= 1");
  require(lambda >= 0.0, "variance_cfd: lambda must be >= 0");
  require(sigma * h > 0.0, "variance_cfd: sigma*h must be > 0");
  return n * lambda * lambda / (2.0 * sigma * sigma * h * h);
}

double variance_nmxfd(int n, double lambda, double sigma, double h, int m) {
  const CoefficientTable table = mixing_coefficients(m, h);
  return variance_cfd(n, lambda, sigma, h) * table.variance_factor();
}

double bias_bound_nmxfd(double H, double sigma, int m, double h, int n) {
  require(m >= 1, "bias_bound_nmxfd: m must be >= 1");
  return nmxfd_error_bound(H, sigma, m * h, n);
}

namespace {

// sample set for the local-constant estimators: box center, per-axis
// extremes, up to 16 corners, then seeded uniform interior points
std::vector<Point> sample_box(std::span<const double> lo,
                              std::span<const double> hi, int samples,
                              std::uint64_t seed) {
  const std::size_t n = lo.size();
  std::vector<Point> pts;
  Point center(n);
  for (std::size_t i = 0; i < n; ++i) center[i] = 0.5 * (lo[i] + hi[i]);
  pts.push_back(center);
  for (std::size_t i = 0; i < n; ++i) {
    Point a = center, b = center;
    a[i] = lo[i];
    b[i] = hi[i];
    pts.push_back(a);
    pts.push_back(b);
  }
  const std::size_t corners = n <= 4 ? (std::size_t{1} << n) : 16;
  for (std::size_t c = 0; c < corners; ++c) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = (c >> (i % 16)) & 1 ? hi[i] : lo[i];
    }
    pts.push_back(p);
  }
  NormalStream stream(derive_seed(seed, {0x10CA1u}));
  for (int k = 0; k < samples; ++k) {
    Point p(n);
    for (std::size_t i = 0; i < n; ++i) {
      p[i] = lo[i] + (hi[i] - lo[i]) * stream.next_uniform();
    }
    pts.push_back(p);
  }
  return pts;
}

// central 4-point cross-difference Hessian
std::vector<double> fd_hessian(const EvalFn& f, const Point& x, double step) {
  const std::size_t n = x.size();
  std::vector<double> hess(n * n);
  Point p = x;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i; j < n; ++j) {
      double v;
      if (i == j) {
        const double f0 = f(x);
        p[i] = x[i] + step;
        const double fp = f(p);
        p[i] = x[i] - step;
        const double fm = f(p);
        p[i] = x[i];
        v = (fp - 2.0 * f0 + fm) / (step * step);
      } else {
        p[i] = x[i] + step;
        p[j] = x[j] + step;
        const double fpp = f(p);
        p[j] = x[j] - step;
        const double fpm = f(p);
        p[i] = x[i] - step;
        const double fmm = f(p);
        p[j] = x[j] + step;
        const double fmp = f(p);
        p[i] = x[i];
        p[j] = x[j];
        v = (fpp - fpm - fmp + fmm) / (4.0 * step * step);
      }
      hess[i * n + j] = v;
      hess[j * n + i] = v;
    }
  }
  return hess;
}

double frobenius(const std::vector<double>& m) {
  double s = 0.0;
  for (double v : m) s += v * v;
  return std::sqrt(s);
}

double box_scale(std::span<const double> lo, std::span<const double> hi) {
  double w = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    w = std::max(w, hi[i] - lo[i]);
  }
  return std::max(w, 1e-6);
}

}  // namespace

double estimate_lipschitz_grad(const EvalFn& f, std::span<const double> lo,
                               std::span<const double> hi, int samples,
                               std::uint64_t seed) {
  require(lo.size() == hi.size() && !lo.empty(),
          "estimate_lipschitz_grad: bad box");
  const double step = 1e-4 * box_scale(lo, hi);
  double worst = 0.0;
  for (const Point& p : sample_box(lo, hi, samples, seed)) {
    worst = std::max(worst, frobenius(fd_hessian(f, p, step)));
  }
  return 1.5 * worst;
}

double estimate_lipschitz_hess(const EvalFn& f, std::span<const double> lo,
                               std::span<const double> hi, int samples,
                               std::uint64_t seed) {
  require(lo.size() == hi.size() && !lo.empty(),
          "estimate_lipschitz_hess: bad box");
  const double step = 2e-3 * box_scale(lo, hi);
  const auto pts = sample_box(lo, hi, samples, seed);
  std::vector<std::vector<double>> hessians;
  hessians.reserve(pts.size());
  for (const Point& p : pts) hessians.push_back(fd_hessian(f, p, step));
  double worst = 0.0;
  for (std::size_t a = 0; a < pts.size(); ++a) {
    for (std::size_t b = a + 1; b < pts.size(); ++b) {
      double dist2 = 0.0;
      for (std::size_t i = 0; i < pts[a].size(); ++i) {
        const double d = pts[a][i] - pts[b][i];
        dist2 += d * d;
      }
      if (dist2 < 1e-12) continue;
      double diff = 0.0;
      for (std::size_t i = 0; i < hessians[a].size(); ++i) {
        const double d = hessians[a][i] - hessians[b][i];
        diff += d * d;
      }
      worst = std::max(worst, std::sqrt(diff / dist2));
    }
  }
  return 1.5 * worst;
}

}  // namespace gradmix
