#include "gradmix/quadrature.hpp"
#include <algorithm>

#include <cmath>
#include <string>

namespace gradmix {

namespace {

struct Worker {
  const std::function<double(double)>& f;
  long max_evals;
  long evals = 0;
  double value = 0.0;
  double err = 0.0;

  double eval(double x) {
    if (evals >= max_evals) {
      throw QuadratureError(
          "integrate_adaptive: evaluation budget exhausted (achieved error "
          "estimate " +
              std::to_string(err) + ")",
          IntegrationResult{value, err, evals});
    }
    ++evals;
    return f(x);
  }

  // whole = Simpson on [a,b] with endpoint/midpoint values already known
  void refine(double a, double b, double fa, double fm, double fb,
              double whole, double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval(lm);
    const double frm = eval(rm);
    const double h6 = (b - a) / 12.0;
    const double left = h6 * (fa + 4.0 * flm + fm);
    const double right = h6 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    // rounding floor: below it delta is arithmetic noise, not quadrature
    // error. Two contributions: rounding of the panel values, and the
    // midpoint 0.5*(a+b) sitting up to half an ulp of |a|,|b| off center,
    // which leaves a length mismatch of order eps * |x| * f.
    constexpr double eps = 2.220446049250313e-16;
    const double fmax =
        std::max({std::fabs(fa), std::fabs(flm), std::fabs(fm),
                  std::fabs(frm), std::fabs(fb)});
    const double panel_scale =
        std::fabs(h6) * (std::fabs(fa) + 4.0 * std::fabs(flm) +
                         2.0 * std::fabs(fm) + 4.0 * std::fabs(frm) +
                         std::fabs(fb));
    const double noise_floor =
        8.0 * eps * (panel_scale + std::max(std::fabs(a), std::fabs(b)) * fmax);
    if (std::fabs(delta) <= 15.0 * tol || std::fabs(delta) <= noise_floor) {
      value += left + right + delta / 15.0;
      err += std::fabs(delta) / 15.0;
      return;
    }
    if (depth <= 0) {
      throw QuadratureError(
          "integrate_adaptive: recursion depth exhausted (achieved error "
          "estimate " +
              std::to_string(err + std::fabs(delta) / 15.0) + ")",
          IntegrationResult{value, err, evals});
    }
    refine(a, m, fa, flm, fm, left, 0.5 * tol, depth - 1);
    refine(m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double abs_tol,
                                     long max_evals) {
  if (!(abs_tol > 0.0)) {
    throw std::invalid_argument("integrate_adaptive: abs_tol must be > 0");
  }
  if (a == b) return {0.0, 0.0, 0};
  Worker w{f, max_evals};
  const double fa = w.eval(a);
  const double fm = w.eval(0.5 * (a + b));
  const double fb = w.eval(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  w.refine(a, b, fa, fm, fb, whole, abs_tol, 52);
  return {w.value, w.err, w.evals};
}

}  // namespace gradmix
