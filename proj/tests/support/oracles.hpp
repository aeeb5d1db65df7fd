#pragma once

// Independent reference computations used by the test suites. None of these
// call into the code under test beyond plain evaluation.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <numeric>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

using Fn = std::function<double(const Eigen::VectorXd&)>;

inline Eigen::VectorXd fd_gradient(const Fn& f, const Eigen::VectorXd& x, double h = 1e-5) {
  Eigen::VectorXd g(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    Eigen::VectorXd a = x, b = x;
    a[i] += h;
    b[i] -= h;
    g[i] = (f(a) - f(b)) / (2 * h);
  }
  return g;
}

/// Count of involutions by scanning all n! permutations.
inline long long brute_force_involutions(int n) {
  std::vector<int> p(static_cast<std::size_t>(n));
  std::iota(p.begin(), p.end(), 0);
  long long count = 0;
  do {
    bool inv = true;
    for (int i = 0; i < n && inv; ++i) inv = p[static_cast<std::size_t>(p[static_cast<std::size_t>(i)])] == i;
    if (inv) ++count;
  } while (std::next_permutation(p.begin(), p.end()));
  return count;
}

/// prod_{i<j} |x_i - x_j|
inline double vandermonde(const std::vector<double>& x) {
  double v = 1.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) v *= std::abs(x[i] - x[j]);
  }
  return v;
}

/// Roots of a polynomial (ascending coefficients) from the companion matrix.
inline Eigen::VectorXcd companion_roots(const std::vector<double>& c) {
  const auto n = static_cast<Eigen::Index>(c.size() - 1);
  Eigen::MatrixXd C = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 1; i < n; ++i) C(i, i - 1) = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) C(i, n - 1) = -c[static_cast<std::size_t>(i)] / c.back();
  return Eigen::EigenSolver<Eigen::MatrixXd>(C, false).eigenvalues();
}

inline double normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }
inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Composite Simpson rule on [a, b] with an even number of panels.
inline double simpson(const std::function<double(double)>& f, double a, double b, int panels) {
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
  return s * h / 3.0;
}

/// P(xi_1^2 >= 4 xi_0), xi ~ N(0,1): 1-D quadrature over xi_1.
inline double monic_quadratic_real_probability() {
  return simpson([](double b) { return normal_pdf(b) * normal_cdf(b * b / 4.0); }, -12.0, 12.0, 20000);
}

/// P(xi_1^2 >= 4 xi_0 xi_2) for independent standard normals: nested 2-D
/// quadrature over (xi_0, xi_2), with xi_1 integrated in closed form.
inline double kac_quadratic_real_probability() {
  auto inner = [](double a) {
    return simpson(
        [a](double c) {
          const double q = 4.0 * a * c;
          const double p = q <= 0.0 ? 1.0 : 2.0 * normal_cdf(-std::sqrt(q));
          return normal_pdf(c) * p;
        },
        -10.0, 10.0, 4000);
  };
  return simpson([&](double a) { return normal_pdf(a) * inner(a); }, -10.0, 10.0, 4000);
}

}  // namespace oracle
