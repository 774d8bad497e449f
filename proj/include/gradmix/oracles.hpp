#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "gradmix/quadrature.hpp"
#include "gradmix/testfns.hpp"

namespace gradmix {

// A theoretical bound next to the quantity it is supposed to dominate.
struct BoundReport {
  double bound = 0.0;
  double observed = 0.0;
  bool satisfied = false;  // observed <= bound * (1 + 1e-9)
};

BoundReport make_bound_report(double bound, double observed);

// High-accuracy reference for the Gaussian-filtered partial derivative
//   (1/sigma) * int_{-S}^{S} f(x_i + sigma s, xbar_i) s phi(s) ds
// by adaptive quadrature to absolute tolerance tol. S >= 8 makes the
// truncation negligible (the tail mass of s*phi beyond 8 is < 1e-13).
double filtered_derivative_oracle(const EvalFn& f, std::span<const double> x,
                                  int axis, double sigma, double S, double tol,
                                  long max_evals = 1'000'000);

struct OracleAccuracy {
  enum class Mode { Tensor, MonteCarlo };
  Mode mode = Mode::Tensor;
  double tol = 1e-7;           // per-component absolute tolerance (tensor)
  long max_evals = 50'000'000; // objective-call budget (tensor)
  long mc_samples = 200'000;   // Monte Carlo mode
  std::uint64_t seed = 0;
};

struct SmoothedGradient {
  std::vector<double> value;
  // Monte Carlo mode only: sqrt(sum of per-component variances of the mean)
  std::optional<double> std_error;
};

// Full smoothed gradient (1/sigma) * int f(x + sigma s) s phi(s) ds over
// R^n, truncated at |s_k| <= 8 per axis. Tensor mode requires n <= 3;
// larger n must use Monte Carlo mode (with the standard error reported).
SmoothedGradient smoothed_gradient_oracle(const EvalFn& f,
                                          std::span<const double> x,
                                          double sigma,
                                          const OracleAccuracy& accuracy);

// L sigma sqrt(n (15 + 7(n-1))): gap between the full smoothed gradient and
// its per-component filtered counterpart.
double smoothing_gap_bound(double L, double sigma, int n);

// ||G_sigma - grad f|| under an L-Lipschitz gradient (c_phi * L * sigma) or
// an H-Lipschitz Hessian (c_phi * H * sigma^2). The kernel constant c_phi
// has no default; callers supply their own.
double smoothing_error_bound_grad_lipschitz(double c_phi, double L,
                                            double sigma);
double smoothing_error_bound_hess_lipschitz(double c_phi, double H,
                                            double sigma);

// sqrt(n) H sigma^2 S^2 / 6: deterministic error of the normalized mixed
// scheme under an H-Lipschitz Hessian.
double nmxfd_error_bound(double H, double sigma, double S, int n);

// H sigma^2 (j h)^2 / 6: single central difference at step sigma*j*h.
double cfd_error_bound(double H, double sigma, double h, int j);

// n lambda^2 / (2 sigma^2 h^2): noise variance (trace of covariance) of the
// central-difference gradient estimate.
double variance_cfd(int n, double lambda, double sigma, double h);

// variance_cfd * sum_j a_j^2 / j^2 with the (m, h) mixing table; strictly
// below variance_cfd for every m > 1.
double variance_nmxfd(int n, double lambda, double sigma, double h, int m);

// sqrt(n) H sigma^2 m^2 h^2 / 6, identical to nmxfd_error_bound at S = m*h.
double bias_bound_nmxfd(double H, double sigma, int m, double h, int n);

// Certified local overestimates used when an objective declares no L or H:
// sampled difference quotients over the box (corners, axis extremes, and
// seeded interior points), times a 1.5 safety factor.
double estimate_lipschitz_grad(const EvalFn& f, std::span<const double> lo,
                               std::span<const double> hi, int samples = 20,
                               std::uint64_t seed = 0);
double estimate_lipschitz_hess(const EvalFn& f, std::span<const double> lo,
                               std::span<const double> hi, int samples = 20,
                               std::uint64_t seed = 0);

}  // namespace gradmix
