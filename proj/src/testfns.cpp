#include "gradmix/testfns.hpp"

#include <cmath>
#include <stdexcept>

namespace gradmix {

namespace {

Point repeat_pattern(std::initializer_list<double> pattern, int n) {
  Point p(n);
  int i = 0;
  for (auto it = pattern.begin(); i < n; ++i, ++it) {
    if (it == pattern.end()) it = pattern.begin();
    p[i] = *it;
  }
  return p;
}

Objective make_sphere(int n) {
  Objective o;
  o.name = "sphere";
  o.dim = n;
  o.eval = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v;
    return s;
  };
  o.grad = [](std::span<const double> x) {
    Point g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * x[i];
    return g;
  };
  o.lipschitz_grad = 2.0;
  o.lipschitz_hess = 0.0;
  o.start = repeat_pattern({1.2, -0.8, 1.5, -1.1}, n);
  o.box = {-5.0, 5.0};
  return o;
}

// diagonal quadratic with condition number 10^3
Objective make_quad_illcond(int n) {
  Objective o;
  o.name = "quad_illcond";
  o.dim = n;
  Point kappa(n);
  for (int i = 0; i < n; ++i) {
    kappa[i] = n > 1 ? std::pow(10.0, 3.0 * i / (n - 1)) : 1.0;
  }
  o.eval = [kappa](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += kappa[i] * x[i] * x[i];
    return s;
  };
  o.grad = [kappa](std::span<const double> x) {
    Point g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * kappa[i] * x[i];
    return g;
  };
  o.lipschitz_grad = 2.0 * 1e3;
  o.lipschitz_hess = 0.0;
  o.start = repeat_pattern({1.0, -1.0, 0.5, -0.5}, n);
  o.box = {-5.0, 5.0};
  return o;
}

Objective make_quad_scaled(int n) {
  Objective o;
  o.name = "quad_scaled";
  o.dim = n;
  o.eval = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (i + 1.0) * x[i] * x[i];
    return s;
  };
  o.grad = [](std::span<const double> x) {
    Point g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) g[i] = 2.0 * (i + 1.0) * x[i];
    return g;
  };
  o.lipschitz_grad = 2.0 * n;
  o.lipschitz_hess = 0.0;
  o.start = repeat_pattern({2.0, -1.5, 1.0, -0.5}, n);
  o.box = {-5.0, 5.0};
  return o;
}

// sum x_i^3 + x_i^2: local minimizer at the origin, Hessian-Lipschitz
// constant 6 (diagonal Hessian 6 x_i + 2)
Objective make_cubic_valley(int n) {
  Objective o;
  o.name = "cubic_valley";
  o.dim = n;
  o.eval = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += v * v * v + v * v;
    return s;
  };
  o.grad = [](std::span<const double> x) {
    Point g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      g[i] = 3.0 * x[i] * x[i] + 2.0 * x[i];
    }
    return g;
  };
  o.lipschitz_hess = 6.0;
  o.start = repeat_pattern({0.45, 0.3, 0.5, 0.35}, n);
  o.box = {-2.0, 2.0};
  return o;
}

Objective make_rosenbrock(int n, std::string name) {
  Objective o;
  o.name = std::move(name);
  o.dim = n;
  o.eval = [](std::span<const double> x) {
    double s = 0.0;
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      const double b = 1.0 - x[i];
      s += 100.0 * a * a + b * b;
    }
    return s;
  };
  o.grad = [](std::span<const double> x) {
    Point g(x.size(), 0.0);
    for (std::size_t i = 0; i + 1 < x.size(); ++i) {
      const double a = x[i + 1] - x[i] * x[i];
      g[i] += -400.0 * x[i] * a - 2.0 * (1.0 - x[i]);
      g[i + 1] += 200.0 * a;
    }
    return g;
  };
  o.start = repeat_pattern({-1.2, 1.0}, n);
  o.box = {-3.0, 3.0};
  return o;
}

Objective make_powell4() {
  Objective o;
  o.name = "powell4";
  o.dim = 4;
  o.eval = [](std::span<const double> x) {
    const double t1 = x[0] + 10.0 * x[1];
    const double t2 = x[2] - x[3];
    const double t3 = x[1] - 2.0 * x[2];
    const double t4 = x[0] - x[3];
    return t1 * t1 + 5.0 * t2 * t2 + t3 * t3 * t3 * t3 +
           10.0 * t4 * t4 * t4 * t4;
  };
  o.grad = [](std::span<const double> x) {
    const double t1 = x[0] + 10.0 * x[1];
    const double t2 = x[2] - x[3];
    const double t3 = x[1] - 2.0 * x[2];
    const double t4 = x[0] - x[3];
    const double t3c = t3 * t3 * t3;
    const double t4c = t4 * t4 * t4;
    return Point{2.0 * t1 + 40.0 * t4c, 20.0 * t1 + 4.0 * t3c,
                 10.0 * t2 - 8.0 * t3c, -10.0 * t2 - 40.0 * t4c};
  };
  o.start = {3.0, -1.0, 0.0, 1.0};
  o.box = {-4.0, 4.0};
  return o;
}

Objective make_wood4() {
  Objective o;
  o.name = "wood4";
  o.dim = 4;
  o.eval = [](std::span<const double> x) {
    const double a = x[1] - x[0] * x[0];
    const double b = 1.0 - x[0];
    const double c = x[3] - x[2] * x[2];
    const double d = 1.0 - x[2];
    const double e = 1.0 - x[1];
    const double f = 1.0 - x[3];
    return 100.0 * a * a + b * b + 90.0 * c * c + d * d +
           10.1 * (e * e + f * f) + 19.8 * e * f;
  };
  o.grad = [](std::span<const double> x) {
    const double a = x[1] - x[0] * x[0];
    const double c = x[3] - x[2] * x[2];
    const double e = 1.0 - x[1];
    const double f = 1.0 - x[3];
    return Point{-400.0 * x[0] * a - 2.0 * (1.0 - x[0]),
                 200.0 * a - 20.2 * e - 19.8 * f,
                 -360.0 * x[2] * c - 2.0 * (1.0 - x[2]),
                 180.0 * c - 20.2 * f - 19.8 * e};
  };
  o.start = {-3.0, -1.0, -3.0, -1.0};
  o.box = {-4.0, 4.0};
  return o;
}

Objective make_beale() {
  Objective o;
  o.name = "beale";
  o.dim = 2;
  o.eval = [](std::span<const double> x) {
    const double c[3] = {1.5, 2.25, 2.625};
    double s = 0.0;
    double yk = 1.0;
    for (int k = 0; k < 3; ++k) {
      yk *= x[1];
      const double r = c[k] - x[0] * (1.0 - yk);
      s += r * r;
    }
    return s;
  };
  o.grad = [](std::span<const double> x) {
    const double c[3] = {1.5, 2.25, 2.625};
    Point g(2, 0.0);
    double yk = 1.0;
    for (int k = 0; k < 3; ++k) {
      const double ykm1 = yk;  // y^k before this factor, i.e. y^(k)
      yk *= x[1];
      const double r = c[k] - x[0] * (1.0 - yk);
      g[0] += 2.0 * r * (yk - 1.0);
      g[1] += 2.0 * r * x[0] * (k + 1.0) * ykm1;
    }
    return g;
  };
  o.start = {1.0, 1.0};
  o.box = {-4.5, 4.5};
  return o;
}

// sum of squares of f_i = n - sum_j cos x_j + i (1 - cos x_i) - sin x_i
Objective make_trigonometric(int n) {
  Objective o;
  o.name = "trigonometric";
  o.dim = n;
  o.eval = [n](std::span<const double> x) {
    double sumcos = 0.0;
    for (double v : x) sumcos += std::cos(v);
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double fi = n - sumcos + (i + 1.0) * (1.0 - std::cos(x[i])) -
                        std::sin(x[i]);
      s += fi * fi;
    }
    return s;
  };
  o.grad = [n](std::span<const double> x) {
    double sumcos = 0.0;
    for (double v : x) sumcos += std::cos(v);
    Point fvec(n);
    double fsum = 0.0;
    for (int i = 0; i < n; ++i) {
      fvec[i] = n - sumcos + (i + 1.0) * (1.0 - std::cos(x[i])) -
                std::sin(x[i]);
      fsum += fvec[i];
    }
    Point g(n);
    for (int j = 0; j < n; ++j) {
      g[j] = 2.0 * std::sin(x[j]) * fsum +
             2.0 * fvec[j] * ((j + 1.0) * std::sin(x[j]) - std::cos(x[j]));
    }
    return g;
  };
  o.start = Point(n, 1.0 / n);
  o.box = {-2.0, 2.0};
  return o;
}

Objective make_exp_quadratic(int n) {
  Objective o;
  o.name = "exp_quadratic";
  o.dim = n;
  o.eval = [](std::span<const double> x) {
    double s = 0.0;
    for (double v : x) s += std::exp(v) - 1.0 - v + 0.5 * v * v;
    return s;
  };
  o.grad = [](std::span<const double> x) {
    Point g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
      g[i] = std::exp(x[i]) - 1.0 + x[i];
    }
    return g;
  };
  o.start = repeat_pattern({1.0, -1.0, 1.5, -0.5}, n);
  o.box = {-3.0, 3.0};
  return o;
}

Objective make_log_sum_exp() {
  Objective o;
  o.name = "log_sum_exp";
  o.dim = 3;
  static constexpr double A[7][3] = {
      {1.0, 0.0, 0.0}, {-1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, -1.0, 0.0},
      {0.0, 0.0, 1.0}, {0.0, 0.0, -1.0}, {0.5, 0.5, -0.25}};
  static constexpr double B[7] = {0.2, -0.1, 0.1, 0.3, -0.2, 0.0, 0.15};
  auto terms = [](std::span<const double> x, double* z) {
    double zmax = -1e300;
    for (int k = 0; k < 7; ++k) {
      z[k] = A[k][0] * x[0] + A[k][1] * x[1] + A[k][2] * x[2] + B[k];
      zmax = std::max(zmax, z[k]);
    }
    return zmax;
  };
  o.eval = [terms](std::span<const double> x) {
    double z[7];
    const double zmax = terms(x, z);
    double s = 0.0;
    for (int k = 0; k < 7; ++k) s += std::exp(z[k] - zmax);
    return zmax + std::log(s);
  };
  o.grad = [terms](std::span<const double> x) {
    double z[7];
    const double zmax = terms(x, z);
    double p[7];
    double s = 0.0;
    for (int k = 0; k < 7; ++k) {
      p[k] = std::exp(z[k] - zmax);
      s += p[k];
    }
    Point g(3, 0.0);
    for (int k = 0; k < 7; ++k) {
      const double w = p[k] / s;
      for (int i = 0; i < 3; ++i) g[i] += w * A[k][i];
    }
    return g;
  };
  o.lipschitz_grad = 1.0;  // max_k ||a_k||^2, dominates the softmax Hessian
  o.start = {1.0, -1.0, 0.5};
  o.box = {-3.0, 3.0};
  return o;
}

Objective make_himmelblau() {
  Objective o;
  o.name = "himmelblau";
  o.dim = 2;
  o.eval = [](std::span<const double> x) {
    const double a = x[0] * x[0] + x[1] - 11.0;
    const double b = x[0] + x[1] * x[1] - 7.0;
    return a * a + b * b;
  };
  o.grad = [](std::span<const double> x) {
    const double a = x[0] * x[0] + x[1] - 11.0;
    const double b = x[0] + x[1] * x[1] - 7.0;
    return Point{4.0 * x[0] * a + 2.0 * b, 2.0 * a + 4.0 * x[1] * b};
  };
  o.start = {0.0, 0.0};
  o.box = {-5.0, 5.0};
  return o;
}

struct Family {
  const char* name;
  bool flexible;
  int default_dim;
  Objective (*make)(int);
};

Objective make_fixed(Objective (*f)(), int) { return f(); }

const Family kFamilies[] = {
    {"sphere", true, 4, make_sphere},
    {"quad_illcond", true, 6, make_quad_illcond},
    {"quad_scaled", true, 5, make_quad_scaled},
    {"cubic_valley", true, 3, make_cubic_valley},
    {"rosenbrock2", false, 2, [](int) { return make_rosenbrock(2, "rosenbrock2"); }},
    {"rosenbrock10", false, 10, [](int) { return make_rosenbrock(10, "rosenbrock10"); }},
    {"powell4", false, 4, [](int n) { return make_fixed(make_powell4, n); }},
    {"wood4", false, 4, [](int n) { return make_fixed(make_wood4, n); }},
    {"beale", false, 2, [](int n) { return make_fixed(make_beale, n); }},
    {"trigonometric", true, 5, make_trigonometric},
    {"exp_quadratic", true, 3, make_exp_quadratic},
    {"log_sum_exp", false, 3, [](int n) { return make_fixed(make_log_sum_exp, n); }},
    {"himmelblau", false, 2, [](int n) { return make_fixed(make_himmelblau, n); }},
};

}  // namespace

const std::vector<Objective>& registry() {
  static const std::vector<Objective> objectives = [] {
    std::vector<Objective> v;
    for (const Family& fam : kFamilies) v.push_back(fam.make(fam.default_dim));
    return v;
  }();
  return objectives;
}

std::vector<std::string> objective_names() {
  std::vector<std::string> names;
  for (const Family& fam : kFamilies) names.emplace_back(fam.name);
  return names;
}

Objective find_objective(std::string_view name, int dim) {
  for (const Family& fam : kFamilies) {
    if (name != fam.name) continue;
    if (dim == 0 || dim == fam.default_dim) return fam.make(fam.default_dim);
    if (!fam.flexible) {
      throw std::invalid_argument("objective '" + std::string(name) +
                                  "' has fixed dimension " +
                                  std::to_string(fam.default_dim));
    }
    if (dim < 1) throw std::invalid_argument("objective dimension must be >= 1");
    return fam.make(dim);
  }
  std::string msg = "unknown objective '" + std::string(name) + "'; valid names:";
  for (const Family& fam : kFamilies) {
    msg += ' ';
    msg += fam.name;
  }
  throw std::invalid_argument(msg);
}

}  // namespace gradmix
