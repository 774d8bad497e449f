#include <cmath>
#include <stdexcept>

#include "gradmix/experiment.hpp"

namespace gradmix {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm2(std::span<const double> a) { return std::sqrt(dot(a, a)); }

}  // namespace

Trajectory bfgs_minimize(const Objective& f, Point x0, double grad_tol,
                         int max_iter) {
  if (!f.has_grad()) {
    throw std::invalid_argument("bfgs_minimize: objective '" + f.name +
                                "' has no analytic gradient");
  }
  if (!(grad_tol > 0.0)) {
    throw std::invalid_argument("bfgs_minimize: grad_tol must be > 0");
  }
  if (static_cast<int>(x0.size()) != f.dim) {
    throw std::invalid_argument("bfgs_minimize: x0 has wrong dimension");
  }

  const std::size_t n = x0.size();
  Trajectory traj;
  traj.points.push_back(x0);

  Point x = std::move(x0);
  Point g = f.grad(x);
  const double g0norm = norm2(g);
  const double threshold = grad_tol * (1.0 + g0norm);

  // inverse-Hessian approximation, row-major
  std::vector<double> H(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) H[i * n + i] = 1.0;

  Point d(n), x_new(n), g_new(n), s(n), y(n), Hy(n);

  for (int iter = 0; iter < max_iter; ++iter) {
    if (norm2(g) <= threshold) break;

    for (std::size_t i = 0; i < n; ++i) {
      double v = 0.0;
      for (std::size_t j = 0; j < n; ++j) v += H[i * n + j] * g[j];
      d[i] = -v;
    }
    double gd = dot(g, d);
    if (!(gd < 0.0)) {
      // curvature information went bad; restart from steepest descent
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) H[i * n + j] = (i == j) ? 1.0 : 0.0;
        d[i] = -g[i];
      }
      gd = dot(g, d);
      if (!(gd < 0.0)) break;  // zero gradient
    }

    const double fx = f.eval(x);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= 1e-20) {
      bool moved = false;
      for (std::size_t i = 0; i < n; ++i) {
        x_new[i] = x[i] + alpha * d[i];
        moved |= x_new[i] != x[i];
      }
      if (!moved) break;  // step underflowed: the search has failed
      const double fn = f.eval(x_new);
      if (std::isfinite(fn) && fn <= fx + 1e-4 * alpha * gd) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      traj.truncated = true;
      return traj;
    }

    g_new = f.grad(x_new);
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = x_new[i] - x[i];
      y[i] = g_new[i] - g[i];
    }
    const double sy = dot(s, y);
    if (sy > 1e-12 * norm2(s) * norm2(y)) {
      // H <- (I - rho s y^T) H (I - rho y s^T) + rho s s^T
      const double rho = 1.0 / sy;
      for (std::size_t i = 0; i < n; ++i) {
        double v = 0.0;
        for (std::size_t j = 0; j < n; ++j) v += H[i * n + j] * y[j];
        Hy[i] = v;
      }
      const double yHy = dot(y, Hy);
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          H[i * n + j] += -rho * (Hy[i] * s[j] + s[i] * Hy[j]) +
                          rho * (1.0 + rho * yHy) * s[i] * s[j];
        }
      }
    }
    x = x_new;
    g = g_new;
    traj.points.push_back(x);
  }
  return traj;
}

std::vector<double> default_alphas() {
  return {1.0, 1e-1, 1e-2, 1e-3, 1e-4, 1e-5, 1e-6};
}

BucketSet extract_buckets(const Trajectory& trajectory, const Objective& f,
                          std::span<const double> alphas) {
  if (trajectory.points.empty()) {
    throw std::invalid_argument("extract_buckets: empty trajectory");
  }
  if (!f.has_grad()) {
    throw std::invalid_argument("extract_buckets: objective '" + f.name +
                                "' has no analytic gradient");
  }

  std::vector<double> ratios(trajectory.points.size());
  const double g0 = norm2(f.grad(trajectory.points.front()));
  if (g0 == 0.0) {
    throw std::invalid_argument(
        "extract_buckets: zero gradient at the starting point of '" + f.name +
        "'; function excluded");
  }
  for (std::size_t k = 0; k < trajectory.points.size(); ++k) {
    ratios[k] = norm2(f.grad(trajectory.points[k])) / g0;
  }

  BucketSet out;
  out.function = f.name;
  out.alphas.assign(alphas.begin(), alphas.end());
  out.points.resize(alphas.size());
  for (std::size_t b = 0; b < alphas.size(); ++b) {
    for (std::size_t k = 0; k < ratios.size(); ++k) {
      if (ratios[k] <= alphas[b]) {
        out.points[b] = BucketPoint{k, trajectory.points[k], ratios[k]};
        break;
      }
    }
  }
  return out;
}

double relative_error(std::span<const double> g,
                      std::span<const double> grad_true) {
  if (g.size() != grad_true.size()) {
    throw std::invalid_argument("relative_error: dimension mismatch");
  }
  const double denom = norm2(grad_true);
  if (denom == 0.0) {
    throw std::invalid_argument("relative_error: zero true gradient");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double d = g[i] - grad_true[i];
    s += d * d;
  }
  return std::sqrt(s) / denom;
}

}  // namespace gradmix
