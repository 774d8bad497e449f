#include "gradmix/kernels.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace gradmix {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kInvSqrt2Pi = 0.3989422804014326779399460599343818685;
constexpr double kSqrtPi = 1.7724538509055160272981674833411451828;

void require_finite(double t, const char* what) {
  if (!std::isfinite(t)) {
    throw std::domain_error(std::string(what) + ": non-finite argument");
  }
}

}  // namespace

double gaussian_pdf(double t) {
  require_finite(t, "gaussian_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * t * t);
}

double gaussian_pdf_deriv(double t) {
  require_finite(t, "gaussian_pdf_deriv");
  return -t * gaussian_pdf(t);
}

double gaussian_moment(int d) {
  if (d < 0) throw std::domain_error("gaussian_moment: order must be >= 0");
  if (d % 2 == 1) return 0.0;
  double m = 1.0;  // (d-1)!! with (-1)!! = 1
  for (int k = d - 1; k >= 2; k -= 2) m *= static_cast<double>(k);
  return m;
}

double erf(double z) {
  require_finite(z, "erf");
  const double a = std::fabs(z);
  if (a == 0.0) return z;  // preserves signed zero
  if (a > 6.0) return z > 0.0 ? 1.0 : -1.0;

  // sum_{k>=0} (2 a^2)^k / (2k+1)!!, Neumaier-compensated
  const double w = 2.0 * a * a;
  double term = 1.0;
  double sum = 1.0;
  double comp = 0.0;
  for (int k = 1; k < 512; ++k) {
    term *= w / static_cast<double>(2 * k + 1);
    const double t = sum + term;
    if (std::fabs(sum) >= std::fabs(term)) {
      comp += (sum - t) + term;
    } else {
      comp += (term - t) + sum;
    }
    sum = t;
    if (term < 1e-18 * sum) break;
  }
  sum += comp;
  const double value = (2.0 / kSqrtPi) * a * std::exp(-a * a) * sum;
  return z > 0.0 ? value : -value;
}

double phi_capital(double S) {
  require_finite(S, "phi_capital");
  if (S < 0.0) throw std::domain_error("phi_capital: S must be >= 0");
  // 2 * int_0^S t^2 exp(-t^2) / (2 pi) dt, integrated by parts
  return (kSqrtPi * erf(S) - 2.0 * S * std::exp(-S * S)) / (4.0 * kPi);
}

}  // namespace gradmix
