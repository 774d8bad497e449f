#pragma once

#include <functional>
#include <stdexcept>

namespace gradmix {

struct IntegrationResult {
  double value = 0.0;
  double error_estimate = 0.0;  // accumulated local error bound
  long evals = 0;
};

// Thrown when the evaluation budget or recursion depth runs out before the
// requested tolerance is met; carries the best estimate achieved so far.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& msg, IntegrationResult partial)
      : std::runtime_error(msg), partial_(partial) {}
  const IntegrationResult& partial() const { return partial_; }

 private:
  IntegrationResult partial_;
};

// Adaptive Simpson quadrature on [a, b]: interval bisection driven by the
// |S_fine - S_coarse| / 15 embedded error estimate, with the Richardson
// correction applied to accepted panels.
IntegrationResult integrate_adaptive(const std::function<double(double)>& f,
                                     double a, double b, double abs_tol,
                                     long max_evals = 1'000'000);

}  // namespace gradmix
