#pragma once

#include <vector>

namespace gradmix {

// Trapezoidal mixing weights for the mixed central-difference estimator.
//
// For m central differences at steps j*h, j = 1..m:
//   raw[j]  = 2 j h^2 |phi'(j h)|   (j < m)
//   raw[m]  =   m h^2 |phi'(m h)|   (trapezoid endpoint gets half weight)
//   total   = sum_j raw[j]
//   normalized[j] = raw[j] / total   so the weights sum to one
struct CoefficientTable {
  int m = 0;
  double h = 0.0;
  std::vector<double> raw;         // a'_j, j = 1..m (0-indexed storage)
  double total = 0.0;              // C
  std::vector<double> normalized;  // a_j = a'_j / C

  // sum_j a_j^2 / j^2, the variance reduction factor relative to a single
  // central difference at step h
  double variance_factor() const;
};

// Rejects m < 1 and h <= 0. Raw weights are summed in ascending j with
// compensated summation so the unit-sum property of the normalized weights
// holds to ~1e-15 regardless of m.
CoefficientTable mixing_coefficients(int m, double h);

}  // namespace gradmix
