#include "gradmix/coefficients.hpp"

#include <cmath>
#include <stdexcept>

#include "gradmix/kernels.hpp"

namespace gradmix {

double CoefficientTable::variance_factor() const {
  double s = 0.0;
  for (int j = 1; j <= m; ++j) {
    const double a = normalized[j - 1];
    s += a * a / (static_cast<double>(j) * j);
  }
  return s;
}

CoefficientTable mixing_coefficients(int m, double h) {
  if (m < 1) throw std::invalid_argument("mixing_coefficients: m must be >= 1");
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::invalid_argument("mixing_coefficients: h must be > 0");
  }

  CoefficientTable table;
  table.m = m;
  table.h = h;
  table.raw.resize(m);
  for (int j = 1; j <= m; ++j) {
    const double weight = (j < m) ? 2.0 * j : static_cast<double>(m);
    table.raw[j - 1] = weight * h * h * std::fabs(gaussian_pdf_deriv(j * h));
  }

  // Neumaier sum, ascending j
  double sum = 0.0;
  double comp = 0.0;
  for (double v : table.raw) {
    const double t = sum + v;
    if (std::fabs(sum) >= std::fabs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  table.total = sum + comp;

  table.normalized.resize(m);
  for (int j = 0; j < m; ++j) table.normalized[j] = table.raw[j] / table.total;
  return table;
}

}  // namespace gradmix
