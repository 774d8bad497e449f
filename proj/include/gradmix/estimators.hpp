#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gradmix/coefficients.hpp"
#include "gradmix/testfns.hpp"

namespace gradmix {

enum class Scheme { Ffd, Cfd, Gsg, Cgsg, MxfdRaw, Nmxfd, AvgCfd };

const char* scheme_name(Scheme s);
std::optional<Scheme> scheme_from_name(std::string_view name);

struct GradientEstimate {
  std::vector<double> gradient;
  long evals = 0;  // objective calls consumed by this estimate
};

// Raised when an objective returns a non-finite value during estimation;
// the message names the scheme and the probe that failed.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Forward differences, step > 0; n+1 evaluations (f(x) probed once).
GradientEstimate ffd(const EvalFn& f, std::span<const double> x, double step);

// Central differences at step sigma*h; 2n evaluations.
GradientEstimate cfd(const EvalFn& f, std::span<const double> x, double sigma,
                     double h);

// Smoothed-gradient sample average over M Gaussian directions:
//   (1/M) sum (f(x + sigma s_k) - f(x)) s_k / sigma,  M+1 evaluations.
GradientEstimate gsg(const EvalFn& f, std::span<const double> x, double sigma,
                     int M, std::uint64_t seed);

// Symmetric variant:
//   (1/M) sum (f(x + sigma s_k) - f(x - sigma s_k)) s_k / (2 sigma),
// 2M evaluations.
GradientEstimate cgsg(const EvalFn& f, std::span<const double> x, double sigma,
                      int M, std::uint64_t seed);

// Normalized mixed finite differences: per component, the convex
// combination sum_j a_j * centraldiff(step sigma*j*h) with weights from
// mixing_coefficients(m, h); 2*m*n evaluations. m = 1 reduces to cfd.
GradientEstimate nmxfd(const EvalFn& f, std::span<const double> x, double sigma,
                       int m, double h);

// Same combination with the raw weights a'_j; equals C * nmxfd exactly.
GradientEstimate mxfd_unnormalized(const EvalFn& f, std::span<const double> x,
                                   double sigma, int m, double h);

// Plain average (weights 1/m) of the same central differences.
GradientEstimate raw_average_cfd(const EvalFn& f, std::span<const double> x,
                                 double sigma, int m, double h);

// Scheme parameters; sigma always applies, (m, h, S) drive the mixed
// schemes (S = m*h; give any two), M the sampled-direction schemes, and h
// the effective step sigma*h of ffd/cfd.
struct EstimatorConfig {
  Scheme scheme = Scheme::Nmxfd;
  double sigma = 1e-2;
  std::optional<int> m;
  std::optional<double> h;
  std::optional<double> S;
  std::optional<int> M;
  std::uint64_t seed = 0;
};

// Validated configuration with the coefficient table built eagerly, so
// benchmark loops can reuse one table across millions of estimates.
class Estimator {
 public:
  explicit Estimator(const EstimatorConfig& cfg);

  GradientEstimate estimate(const EvalFn& f, std::span<const double> x) const {
    return estimate(f, x, cfg_.seed);
  }
  // seed override for substream control (ignored by the deterministic
  // schemes)
  GradientEstimate estimate(const EvalFn& f, std::span<const double> x,
                            std::uint64_t seed) const;

  Scheme scheme() const { return cfg_.scheme; }
  double sigma() const { return cfg_.sigma; }
  int m() const { return m_; }
  double h() const { return h_; }
  double S() const { return S_; }
  int M() const { return M_; }
  const CoefficientTable* table() const {
    return table_ ? &*table_ : nullptr;
  }

 private:
  EstimatorConfig cfg_;
  int m_ = 1;
  double h_ = 1.0;
  double S_ = 1.0;
  int M_ = 1;
  std::optional<CoefficientTable> table_;
};

// Default truncation half-width when only m is given: S = 3 covers all but
// ~0.3% of the Gaussian mass and fixes the deterministic error bound
// independently of m.
inline constexpr double kDefaultTruncation = 3.0;

}  // namespace gradmix
