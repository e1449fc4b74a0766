#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <string>

#include "errors.hpp"

namespace frfl {

using Vec2 = std::array<double, 2>;

/// Uniform periodic grid on [0, L)^d with n points per axis.
///
/// Spectral index i along an axis maps to the signed mode m = i for i < n/2
/// and m = i - n otherwise, so modes run over {-n/2, ..., n/2 - 1} and the
/// physical wavenumber is 2*pi*m/L. Flat indices are row-major with the last
/// axis fastest.
class Grid {
 public:
  Grid(int dim, int n, double length) : dim_(dim), n_(n), length_(length) {
    if (dim != 1 && dim != 2)
      throw ConfigError("unsupported dimension " + std::to_string(dim) + " (expected 1 or 2)");
    if (n < 8 || (n & (n - 1)) != 0)
      throw ConfigError("points per axis must be a power of two >= 8, got " + std::to_string(n));
    if (!(length > 0.0) || !std::isfinite(length))
      throw ConfigError("box length must be positive and finite");
  }

  int dim() const noexcept { return dim_; }
  int n() const noexcept { return n_; }
  double length() const noexcept { return length_; }
  std::size_t size() const noexcept {
    return dim_ == 1 ? static_cast<std::size_t>(n_) : static_cast<std::size_t>(n_) * n_;
  }
  double spacing() const noexcept { return length_ / n_; }
  double cell_volume() const noexcept { return std::pow(spacing(), dim_); }
  double volume() const noexcept { return std::pow(length_, dim_); }
  double base_wavenumber() const noexcept { return 2.0 * std::numbers::pi / length_; }

  int signed_mode(int index) const noexcept { return index < n_ / 2 ? index : index - n_; }

  /// Integer mode vector (second entry 0 in 1D).
  std::array<int, 2> mode(std::size_t flat) const noexcept {
    if (dim_ == 1) return {signed_mode(static_cast<int>(flat)), 0};
    return {signed_mode(static_cast<int>(flat / n_)), signed_mode(static_cast<int>(flat % n_))};
  }

  Vec2 wavevector(std::size_t flat) const noexcept {
    auto m = mode(flat);
    double k0 = base_wavenumber();
    return {k0 * m[0], k0 * m[1]};
  }

  double wavevector_norm(std::size_t flat) const noexcept {
    auto k = wavevector(flat);
    return std::hypot(k[0], k[1]);
  }

  /// True for modes sitting on the Nyquist index of some axis.
  bool is_nyquist(std::size_t flat) const noexcept {
    auto m = mode(flat);
    return m[0] == -n_ / 2 || (dim_ == 2 && m[1] == -n_ / 2);
  }

  Vec2 position(std::size_t flat) const noexcept {
    double h = spacing();
    if (dim_ == 1) return {h * static_cast<double>(flat), 0.0};
    return {h * static_cast<double>(flat / n_), h * static_cast<double>(flat % n_)};
  }

  /// Smallest and largest nonzero |k| on the grid.
  double min_nonzero_wavenumber() const noexcept { return base_wavenumber(); }
  double max_wavenumber() const noexcept {
    return base_wavenumber() * (n_ / 2) * std::sqrt(static_cast<double>(dim_));
  }

  friend bool operator==(const Grid& a, const Grid& b) noexcept {
    return a.dim_ == b.dim_ && a.n_ == b.n_ && a.length_ == b.length_;
  }

 private:
  int dim_;
  int n_;
  double length_;
};

inline Grid make_grid(int dim, int n, double length) { return Grid(dim, n, length); }

}  // namespace frfl
