#pragma once

#include <array>
#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

namespace frfl::quad {

/// Gauss-Legendre nodes and weights on [-1, 1] (Newton on P_n).
inline std::vector<std::pair<double, double>> gauss_legendre(int n) {
  std::vector<std::pair<double, double>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    out[static_cast<std::size_t>(i)] = {x, 2.0 / ((1.0 - x * x) * dp * dp)};
  }
  return out;
}

/// Tanh-sinh (double exponential) quadrature on [a, b]; robust against
/// integrable endpoint singularities.
template <class Fn>
double tanh_sinh(Fn&& f, double a, double b, double step = 1.0 / 64.0, double t_max = 3.5) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double acc = 0.0;
  const int n = static_cast<int>(t_max / step);
  for (int k = -n; k <= n; ++k) {
    const double t = k * step;
    const double s = 0.5 * std::numbers::pi * std::sinh(t);
    const double x = std::tanh(s);
    const double c = std::cosh(s);
    const double w = 0.5 * std::numbers::pi * std::cosh(t) / (c * c);
    if (1.0 - std::abs(x) < 1e-15) continue;
    acc += w * f(mid + half * x);
  }
  return acc * half * step;
}

}  // namespace frfl::quad
