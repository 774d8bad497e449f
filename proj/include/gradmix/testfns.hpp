#pragma once

#include <array>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace gradmix {

using Point = std::vector<double>;
using EvalFn = std::function<double(std::span<const double>)>;
using GradFn = std::function<std::vector<double>(std::span<const double>)>;

// A differentiable test objective. `grad` is the analytic gradient (empty
// when unavailable). `lipschitz_grad` (L) and `lipschitz_hess` (H) are
// declared only when they hold globally; local overestimates for the
// remaining functions are produced by the oracles module. `eval` and `grad`
// are finite on [box[0], box[1]]^dim.
struct Objective {
  std::string name;
  int dim = 1;
  EvalFn eval;
  GradFn grad;
  std::optional<double> lipschitz_grad;
  std::optional<double> lipschitz_hess;
  Point start;
  std::array<double, 2> box{-5.0, 5.0};

  bool has_grad() const { return static_cast<bool>(grad); }
};

// Built-in suite at the default dimensions.
const std::vector<Objective>& registry();

std::vector<std::string> objective_names();

// Lookup by name; throws std::invalid_argument listing the valid names on
// a miss. The dimension-flexible families (sphere, quad_illcond,
// quad_scaled, cubic_valley, trigonometric, exp_quadratic) are instantiated
// at `dim` when it is nonzero; fixed-dimension functions reject a mismatch.
Objective find_objective(std::string_view name, int dim = 0);

}  // namespace gradmix
