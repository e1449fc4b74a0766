#pragma once

// Smallness conditions on the initial data: the global condition
//   ||u0||_{B^{2-alpha}_{d,1}} + ||sigma0||_{B^1_{d,1}} < epsilon
// and, when only sigma0 is small, the local-time monitor
//   max(U0^{1/a} (T^{1/a} A)^{1-1/a}, T^{1/a} A) <= epsilon,  A = S0 + U0'.

#include <cmath>
#include <limits>
#include <optional>

#include "euler.hpp"

namespace frfl {

struct GateReport {
  double epsilon = 0.0;
  double eta = 0.0;
  double u_norm = 0.0;      // sup_n ||u0^n||_{B^{2-alpha}_{d,1}} (U0)
  double sigma_norm = 0.0;  // sup_n ||sigma0^n||_{B^1_{d,1}}
  double grad_u_norm = 0.0;      // U0'
  double grad_sigma_norm = 0.0;  // S0
  bool global_pass = false;
  bool sigma_small = false;
  /// Largest horizon allowed by the local monitor; infinity when A = 0.
  std::optional<double> local_T;
};

/// Largest T with max(U0^{1/a}(T^{1/a}A)^{1-1/a}, T^{1/a}A) <= eps.
inline double local_horizon(double u0, double a_sum, double eps, double alpha) {
  if (a_sum <= 0.0) return std::numeric_limits<double>::infinity();
  const double t_linear = std::pow(eps / a_sum, alpha);
  if (u0 <= 0.0) return t_linear;
  const double t_mixed = std::pow(std::pow(eps, alpha / (alpha - 1.0)) * std::pow(u0, -1.0 / (alpha - 1.0)) / a_sum, alpha);
  return std::min(t_linear, t_mixed);
}

/// Norms are sup'd over the truncation ladder n = 0 .. full level (n0 = 0),
/// which is how the constants are defined for the approximate solutions.
inline GateReport smallness_gates(const ScalarField& sigma0, const VectorField& u0, double epsilon, double eta,
                                  double alpha) {
  if (!(epsilon > 0.0) || !(eta > 0.0)) throw ConfigError("gate thresholds must be positive");
  const DyadicDecomposition dec(sigma0.grid());
  GateReport r;
  r.epsilon = epsilon;
  r.eta = eta;
  const double s = 2.0 - alpha;
  const int top = full_truncation_level(dec);
  for (int n = 0; n <= top; ++n) {
    auto [sn, un] = init_truncated_data(dec, sigma0, u0, n, 0);
    std::vector<ScalarField> gu;
    for (const auto& c : un.components())
      for (int a = 0; a < un.dim(); ++a) gu.push_back(partial(c, a));
    r.u_norm = std::max(r.u_norm, besov_d1(dec, un, s));
    r.sigma_norm = std::max(r.sigma_norm, besov_d1(dec, sn, 1.0));
    r.grad_u_norm = std::max(r.grad_u_norm, besov_d1(dec, gu, s));
    r.grad_sigma_norm = std::max(r.grad_sigma_norm, besov_d1(dec, gradient(sn), 1.0));
  }
  r.global_pass = r.u_norm + r.sigma_norm < epsilon;
  r.sigma_small = r.sigma_norm <= eta;
  if (r.sigma_small) r.local_T = local_horizon(r.u_norm, r.grad_sigma_norm + r.grad_u_norm, epsilon, alpha);
  return r;
}

}  // namespace frfl
