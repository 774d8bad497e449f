#pragma once

#include <cstdint>

#include "gradmix/testfns.hpp"

namespace gradmix {

// Additive observation noise: every evaluation returns f(x) + e with
// e ~ N(0, lambda^2) i.i.d. across calls.
struct NoiseSpec {
  double lambda = 0.0;  // standard deviation, in units of f
  std::uint64_t seed = 0;
};

// Wraps an objective with the noise model. Noise is keyed by stream
// position only, never by x, so repeated evaluations at the same point draw
// independent errors. lambda = 0 is a bitwise pass-through. Copies of the
// returned callable share one stream; do not share a wrap across
// concurrent consumers.
EvalFn noisy_wrap(EvalFn f, NoiseSpec spec);

}  // namespace gradmix
