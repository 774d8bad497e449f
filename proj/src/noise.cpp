#include "gradmix/noise.hpp"

#include <memory>
#include <stdexcept>
#include <utility>

#include "gradmix/rng.hpp"

namespace gradmix {

EvalFn noisy_wrap(EvalFn f, NoiseSpec spec) {
  if (!(spec.lambda >= 0.0)) {
    throw std::invalid_argument("noisy_wrap: lambda must be >= 0");
  }
  if (spec.lambda == 0.0) return f;
  auto stream = std::make_shared<NormalStream>(spec.seed);
  return [f = std::move(f), lambda = spec.lambda,
          stream = std::move(stream)](std::span<const double> x) {
    return f(x) + lambda * stream->next();
  };
}

}  // namespace gradmix
