#include "gradmix/estimators.hpp"

#include <cmath>

#include "gradmix/rng.hpp"

namespace gradmix {

namespace {

double checked_eval(const EvalFn& f, std::span<const double> x, long& evals,
                    const char* scheme, const char* probe) {
  ++evals;
  const double v = f(x);
  if (!std::isfinite(v)) {
    std::string msg(scheme);
    msg += ": objective returned non-finite value at ";
    msg += probe;
    msg += " probe (x =";
    for (double c : x) msg += ' ' + std::to_string(c);
    msg += ')';
    throw EstimationError(msg);
  }
  return v;
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// shared core of the three mixed schemes: per component,
// sum_j weights[j] * (f(x + sigma j h e_i) - f(x - sigma j h e_i)) / (2 sigma j h)
GradientEstimate mixed_differences(const EvalFn& f, std::span<const double> x,
                                   double sigma, int m, double h,
                                   std::span<const double> weights,
                                   const char* scheme) {
  require(m >= 1, "mixed differences: m must be >= 1");
  require(sigma > 0.0 && h > 0.0 && std::isfinite(sigma * h),
          "mixed differences: sigma*h must be a positive finite step");
  const std::size_t n = x.size();
  require(n >= 1, "mixed differences: empty point");

  GradientEstimate out;
  out.gradient.resize(n);
  Point probe(x.begin(), x.end());
  for (std::size_t i = 0; i < n; ++i) {
    const double xi = x[i];
    double acc = 0.0;
    for (int j = 1; j <= m; ++j) {
      const double t = sigma * (static_cast<double>(j) * h);
      probe[i] = xi + t;
      const double fp = checked_eval(f, probe, out.evals, scheme, "forward");
      probe[i] = xi - t;
      const double fm = checked_eval(f, probe, out.evals, scheme, "backward");
      const double cd = (fp - fm) / (2.0 * t);
      acc = (j == 1) ? weights[0] * cd : acc + weights[j - 1] * cd;
    }
    probe[i] = xi;
    out.gradient[i] = acc;
  }
  return out;
}

}  // namespace

const char* scheme_name(Scheme s) {
  switch (s) {
    case Scheme::Ffd: return "ffd";
    case Scheme::Cfd: return "cfd";
    case Scheme::Gsg: return "gsg";
    case Scheme::Cgsg: return "cgsg";
    case Scheme::MxfdRaw: return "mxfd_raw";
    case Scheme::Nmxfd: return "nmxfd";
    case Scheme::AvgCfd: return "avg_cfd";
  }
  return "?";
}

std::optional<Scheme> scheme_from_name(std::string_view name) {
  for (Scheme s : {Scheme::Ffd, Scheme::Cfd, Scheme::Gsg, Scheme::Cgsg,
                   Scheme::MxfdRaw, Scheme::Nmxfd, Scheme::AvgCfd}) {
    if (name == scheme_name(s)) return s;
  }
  return std::nullopt;
}

GradientEstimate ffd(const EvalFn& f, std::span<const double> x, double step) {
  require(step > 0.0 && std::isfinite(step), "ffd: step must be > 0");
  require(!x.empty(), "ffd: empty point");
  GradientEstimate out;
  out.gradient.resize(x.size());
  const double f0 = checked_eval(f, x, out.evals, "ffd", "base");
  Point probe(x.begin(), x.end());
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + step;
    const double fp = checked_eval(f, probe, out.evals, "ffd", "forward");
    probe[i] = x[i];
    out.gradient[i] = (fp - f0) / step;
  }
  return out;
}

GradientEstimate cfd(const EvalFn& f, std::span<const double> x, double sigma,
                     double h) {
  require(sigma > 0.0 && h > 0.0 && std::isfinite(sigma * h),
          "cfd: sigma*h must be a positive finite step");
  require(!x.empty(), "cfd: empty point");
  GradientEstimate out;
  out.gradient.resize(x.size());
  Point probe(x.begin(), x.end());
  const double t = sigma * h;
  for (std::size_t i = 0; i < x.size(); ++i) {
    probe[i] = x[i] + t;
    const double fp = checked_eval(f, probe, out.evals, "cfd", "forward");
    probe[i] = x[i] - t;
    const double fm = checked_eval(f, probe, out.evals, "cfd", "backward");
    probe[i] = x[i];
    out.gradient[i] = (fp - fm) / (2.0 * t);
  }
  return out;
}

GradientEstimate gsg(const EvalFn& f, std::span<const double> x, double sigma,
                     int M, std::uint64_t seed) {
  require(M >= 1, "gsg: M must be >= 1");
  require(sigma > 0.0 && std::isfinite(sigma), "gsg: sigma must be > 0");
  require(!x.empty(), "gsg: empty point");
  const std::size_t n = x.size();
  GradientEstimate out;
  out.gradient.assign(n, 0.0);
  const double f0 = checked_eval(f, x, out.evals, "gsg", "base");
  NormalStream stream(seed);
  Point dir(n);
  Point probe(n);
  for (int k = 0; k < M; ++k) {
    stream.fill(dir);
    for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] + sigma * dir[i];
    const double fp = checked_eval(f, probe, out.evals, "gsg", "sampled");
    const double w = (fp - f0) / (sigma * M);
    for (std::size_t i = 0; i < n; ++i) out.gradient[i] += w * dir[i];
  }
  return out;
}

GradientEstimate cgsg(const EvalFn& f, std::span<const double> x, double sigma,
                      int M, std::uint64_t seed) {
  require(M >= 1, "cgsg: M must be >= 1");
  require(sigma > 0.0 && std::isfinite(sigma), "cgsg: sigma must be > 0");
  require(!x.empty(), "cgsg: empty point");
  const std::size_t n = x.size();
  GradientEstimate out;
  out.gradient.assign(n, 0.0);
  NormalStream stream(seed);
  Point dir(n);
  Point probe(n);
  for (int k = 0; k < M; ++k) {
    stream.fill(dir);
    for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] + sigma * dir[i];
    const double fp = checked_eval(f, probe, out.evals, "cgsg", "forward");
    for (std::size_t i = 0; i < n; ++i) probe[i] = x[i] - sigma * dir[i];
    const double fm = checked_eval(f, probe, out.evals, "cgsg", "backward");
    const double w = (fp - fm) / (2.0 * sigma * M);
    for (std::size_t i = 0; i < n; ++i) out.gradient[i] += w * dir[i];
  }
  return out;
}

GradientEstimate nmxfd(const EvalFn& f, std::span<const double> x, double sigma,
                       int m, double h) {
  const CoefficientTable table = mixing_coefficients(m, h);
  return mixed_differences(f, x, sigma, m, h, table.normalized, "nmxfd");
}

GradientEstimate mxfd_unnormalized(const EvalFn& f, std::span<const double> x,
                                   double sigma, int m, double h) {
  const CoefficientTable table = mixing_coefficients(m, h);
  return mixed_differences(f, x, sigma, m, h, table.raw, "mxfd_raw");
}

GradientEstimate raw_average_cfd(const EvalFn& f, std::span<const double> x,
                                 double sigma, int m, double h) {
  require(m >= 1, "avg_cfd: m must be >= 1");
  const Point weights(m, 1.0 / m);
  return mixed_differences(f, x, sigma, m, h, weights, "avg_cfd");
}

Estimator::Estimator(const EstimatorConfig& cfg) : cfg_(cfg) {
  require(cfg.sigma > 0.0 && std::isfinite(cfg.sigma),
          "estimator config: sigma must be > 0");
  m_ = cfg.m.value_or(1);
  require(m_ >= 1, "estimator config: m must be >= 1");

  if (cfg.h && cfg.S) {
    h_ = *cfg.h;
    S_ = *cfg.S;
    if (std::fabs(S_ - m_ * h_) > 1e-15 * std::max(1.0, std::fabs(S_))) {
      throw std::invalid_argument("estimator config: S != m*h");
    }
  } else if (cfg.S) {
    S_ = *cfg.S;
    h_ = S_ / m_;
  } else if (cfg.h) {
    h_ = *cfg.h;
    S_ = m_ * h_;
  } else if (cfg_.scheme == Scheme::Ffd || cfg_.scheme == Scheme::Cfd) {
    h_ = 1.0;  // plain finite differences default to step sigma
    S_ = m_ * h_;
  } else {
    S_ = kDefaultTruncation;
    h_ = S_ / m_;
  }
  require(h_ > 0.0 && std::isfinite(h_), "estimator config: h must be > 0");

  M_ = cfg.M.value_or(1);
  require(M_ >= 1, "estimator config: M must be >= 1");

  if (cfg_.scheme == Scheme::Nmxfd || cfg_.scheme == Scheme::MxfdRaw) {
    table_ = mixing_coefficients(m_, h_);
  }
}

GradientEstimate Estimator::estimate(const EvalFn& f,
                                     std::span<const double> x,
                                     std::uint64_t seed) const {
  switch (cfg_.scheme) {
    case Scheme::Ffd:
      return ffd(f, x, cfg_.sigma * h_);
    case Scheme::Cfd:
      return cfd(f, x, cfg_.sigma, h_);
    case Scheme::Gsg:
      return gsg(f, x, cfg_.sigma, M_, seed);
    case Scheme::Cgsg:
      return cgsg(f, x, cfg_.sigma, M_, seed);
    case Scheme::Nmxfd:
      return mixed_differences(f, x, cfg_.sigma, m_, h_, table_->normalized,
                               "nmxfd");
    case Scheme::MxfdRaw:
      return mixed_differences(f, x, cfg_.sigma, m_, h_, table_->raw,
                               "mxfd_raw");
    case Scheme::AvgCfd:
      return raw_average_cfd(f, x, cfg_.sigma, m_, h_);
  }
  throw std::logic_error("estimate: unhandled scheme");
}

}  // namespace gradmix
