#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "field.hpp"

namespace frfl {

/// Returns a copy whose Fourier coefficients are authoritative.
inline ScalarField to_spectral(const ScalarField& f) {
  std::vector<cplx> c(f.spectral().begin(), f.spectral().end());
  return ScalarField::from_spectral(f.grid(), std::move(c));
}

/// Returns a copy whose samples are authoritative.
inline ScalarField to_physical(const ScalarField& f) {
  std::vector<double> v(f.values().begin(), f.values().end());
  return ScalarField::from_values(f.grid(), std::move(v));
}

/// Multiplies every coefficient by m(k, |k|, flat index).
template <class Multiplier>
ScalarField apply_multiplier(const ScalarField& f, Multiplier&& m) {
  const Grid& g = f.grid();
  auto src = f.spectral();
  std::vector<cplx> out(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) {
    auto k = g.wavevector(i);
    out[i] = src[i] * m(k, std::hypot(k[0], k[1]), i);
  }
  return ScalarField::from_spectral(g, std::move(out));
}

inline void check_fractional_exponent(double alpha) {
  if (!(alpha > 0.0 && alpha <= 2.0))
    throw ConfigError("fractional exponent must lie in (0, 2], got " + std::to_string(alpha));
}

/// (-Delta)^{alpha/2}: multiplier |k|^alpha, zero at k = 0.
inline ScalarField fractional_laplacian(const ScalarField& f, double alpha) {
  check_fractional_exponent(alpha);
  return apply_multiplier(f, [alpha](const Vec2&, double kn, std::size_t) {
    return kn == 0.0 ? 0.0 : std::pow(kn, alpha);
  });
}

inline VectorField fractional_laplacian(const VectorField& v, double alpha) {
  std::vector<ScalarField> out;
  for (const auto& c : v.components()) out.push_back(fractional_laplacian(c, alpha));
  return VectorField(std::move(out));
}

/// -Delta as the multiplier |k|^2.
inline ScalarField negative_laplacian(const ScalarField& f) {
  return apply_multiplier(f, [](const Vec2& k, double, std::size_t) {
    return k[0] * k[0] + k[1] * k[1];
  });
}

/// d/dx_axis; the Nyquist coefficient is dropped so the result stays real.
inline ScalarField partial(const ScalarField& f, int axis) {
  const Grid& g = f.grid();
  return apply_multiplier(f, [&g, axis](const Vec2& k, double, std::size_t i) {
    return g.is_nyquist(i) ? cplx{} : cplx{0.0, k[static_cast<std::size_t>(axis)]};
  });
}

inline VectorField gradient(const ScalarField& f) {
  std::vector<ScalarField> comps;
  for (int a = 0; a < f.grid().dim(); ++a) comps.push_back(partial(f, a));
  return VectorField(std::move(comps));
}

inline ScalarField divergence(const VectorField& v) {
  const Grid& g = v.grid();
  std::vector<cplx> acc(g.size(), cplx{});
  for (int a = 0; a < v.dim(); ++a) {
    auto c = v[a].spectral();
    for (std::size_t i = 0; i < acc.size(); ++i) {
      if (g.is_nyquist(i)) continue;
      acc[i] += cplx{0.0, g.wavevector(i)[static_cast<std::size_t>(a)]} * c[i];
    }
  }
  return ScalarField::from_spectral(g, std::move(acc));
}

/// True if the mode survives the 2/3 rule: |m_i| <= N/3 on every axis.
inline bool kept_by_dealias(const Grid& g, std::size_t flat) {
  auto m = g.mode(flat);
  const double cut = g.n() / 3.0;
  return std::abs(m[0]) <= cut && std::abs(m[1]) <= cut;
}

/// 2/3-rule truncation; kept coefficients are untouched.
inline ScalarField dealias(const ScalarField& f) {
  const Grid& g = f.grid();
  auto src = f.spectral();
  std::vector<cplx> out(src.begin(), src.end());
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!kept_by_dealias(g, i)) out[i] = cplx{};
  return ScalarField::from_spectral(g, std::move(out));
}

/// Pointwise product without dealiasing.
inline ScalarField pointwise_product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  auto x = a.values();
  auto y = b.values();
  std::vector<double> out(x.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = x[i] * y[i];
  return ScalarField::from_values(a.grid(), std::move(out));
}

/// Dealiased product: the exact product of the two trigonometric
/// interpolants, evaluated on a 3/2-padded grid and truncated by the 2/3
/// rule. Kept coefficients carry no aliased images even when the factors
/// reach the upper third of the spectrum.
inline ScalarField product(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  const Grid& g = a.grid();
  const int n = g.n();
  const int d = g.dim();
  const int m = 3 * n / 2;
  const std::size_t big = d == 1 ? static_cast<std::size_t>(m) : static_cast<std::size_t>(m) * m;
  auto pad = [&](std::span<const cplx> c) {
    std::vector<cplx> out(big, cplx{});
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (c[i] == cplx{}) continue;
      auto k = g.mode(i);
      // A Nyquist coefficient is the cosine at +-n/2; split it across both.
      const int r0 = std::abs(k[0]) == n / 2 ? 2 : 1;
      const int r1 = d == 2 && std::abs(k[1]) == n / 2 ? 2 : 1;
      const cplx w = c[i] / static_cast<double>(r0 * r1);
      for (int s0 = 0; s0 < r0; ++s0) {
        for (int s1 = 0; s1 < r1; ++s1) {
          const int m0 = s0 ? -k[0] : k[0];
          const int m1 = s1 ? -k[1] : k[1];
          const std::size_t i0 = static_cast<std::size_t>((m0 + m) % m);
          const std::size_t i1 = static_cast<std::size_t>((m1 + m) % m);
          out[d == 1 ? i0 : i0 * m + i1] += w;
        }
      }
    }
    return out;
  };
  auto pa = pad(a.spectral());
  auto pb = pad(b.spectral());
  std::vector<cplx> xa(big), xb(big);
  detail::transform(d, m, FFTW_BACKWARD, pa, xa);
  detail::transform(d, m, FFTW_BACKWARD, pb, xb);
  for (std::size_t i = 0; i < big; ++i) xa[i] = cplx{xa[i].real() * xb[i].real(), 0.0};
  detail::transform(d, m, FFTW_FORWARD, xa, xb);
  const double scale = 1.0 / static_cast<double>(big);
  std::vector<cplx> out(g.size(), cplx{});
  for (std::size_t i = 0; i < out.size(); ++i) {
    if (!kept_by_dealias(g, i)) continue;
    auto k = g.mode(i);
    const std::size_t i0 = static_cast<std::size_t>((k[0] + m) % m);
    const std::size_t i1 = static_cast<std::size_t>((k[1] + m) % m);
    out[i] = xb[d == 1 ? i0 : i0 * m + i1] * scale;
  }
  return ScalarField::from_spectral(g, std::move(out));
}

/// Dealiased (u . grad) v, componentwise in v.
inline VectorField advection(const VectorField& u, const VectorField& v) {
  require_same_grid(u.grid(), v.grid());
  std::vector<ScalarField> out;
  for (int i = 0; i < v.dim(); ++i) {
    ScalarField acc(v.grid());
    for (int j = 0; j < u.dim(); ++j) acc += product(u[j], partial(v[i], j));
    out.push_back(std::move(acc));
  }
  return VectorField(std::move(out));
}

/// Discrete integral with the cell-volume weight.
inline double integral(const ScalarField& f) {
  double s = 0.0;
  for (double x : f.values()) s += x;
  return s * f.grid().cell_volume();
}

inline double inner(const ScalarField& a, const ScalarField& b) {
  require_same_grid(a.grid(), b.grid());
  auto x = a.values();
  auto y = b.values();
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s * a.grid().cell_volume();
}

inline double inner(const VectorField& a, const VectorField& b) {
  double s = 0.0;
  for (int i = 0; i < a.dim(); ++i) s += inner(a[i], b[i]);
  return s;
}

/// Cell-volume weighted L^p norm of pointwise Euclidean magnitudes of the
/// given components; p = infinity gives the max.
inline double lp_norm(std::span<const ScalarField> comps, double p) {
  const Grid& g = comps.front().grid();
  const std::size_t n = g.size();
  std::vector<double> mag(n, 0.0);
  if (comps.size() == 1) {
    auto v = comps[0].values();
    for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(v[i]);
  } else {
    for (const auto& c : comps) {
      auto v = c.values();
      for (std::size_t i = 0; i < n; ++i) mag[i] += v[i] * v[i];
    }
    for (double& m : mag) m = std::sqrt(m);
  }
  if (std::isinf(p)) {
    double m = 0.0;
    for (double x : mag) m = std::max(m, x);
    return m;
  }
  double s = 0.0;
  if (p == 1.0) {
    for (double x : mag) s += x;
    return s * g.cell_volume();
  }
  if (p == 2.0) {
    for (double x : mag) s += x * x;
    return std::sqrt(s * g.cell_volume());
  }
  for (double x : mag) s += std::pow(x, p);
  return std::pow(s * g.cell_volume(), 1.0 / p);
}

inline double lp_norm(const ScalarField& f, double p) { return lp_norm(std::span(&f, 1), p); }
inline double lp_norm(const VectorField& v, double p) { return lp_norm(v.components(), p); }

/// Coefficient energy L^d * sum |c_k|^2, equal to the squared L^2 norm.
inline double spectral_energy(const ScalarField& f) {
  double s = 0.0;
  for (const auto& c : f.spectral()) s += std::norm(c);
  return s * f.grid().volume();
}

/// Field with the mean removed.
inline ScalarField mean_free(const ScalarField& f) {
  return apply_multiplier(f, [](const Vec2&, double kn, std::size_t) { return kn == 0.0 ? 0.0 : 1.0; });
}

}  // namespace frfl
