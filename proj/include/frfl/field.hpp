#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "fft.hpp"
#include "grid.hpp"

namespace frfl {

using cplx = std::complex<double>;

/// Real field sampled on a periodic grid, with its Fourier coefficients
/// kept lazily in sync.
///
/// Exactly one representation is authoritative after a mutation; the other
/// is recomputed on first read. Reads are thread-safe, mutation is
/// single-writer.
class ScalarField {
 public:
  explicit ScalarField(Grid grid)
      : grid_(grid), values_(grid.size(), 0.0), has_values_(true), has_spectral_(false) {}

  static ScalarField from_values(Grid grid, std::vector<double> values) {
    if (values.size() != grid.size()) throw std::invalid_argument("sample count does not match grid");
    ScalarField f(grid);
    f.values_ = std::move(values);
    return f;
  }

  static ScalarField from_spectral(Grid grid, std::vector<cplx> coefficients) {
    if (coefficients.size() != grid.size())
      throw std::invalid_argument("coefficient count does not match grid");
    ScalarField f(grid);
    f.spectral_ = std::move(coefficients);
    f.has_spectral_ = true;
    f.has_values_ = false;
    f.values_.clear();
    return f;
  }

  /// Samples fn(x, y) at grid nodes (y = 0 in 1D).
  template <class Fn>
  static ScalarField from_function(Grid grid, Fn&& fn) {
    std::vector<double> v(grid.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
      auto x = grid.position(i);
      v[i] = fn(x[0], x[1]);
    }
    return from_values(grid, std::move(v));
  }

  static ScalarField constant(Grid grid, double value) {
    return from_values(grid, std::vector<double>(grid.size(), value));
  }

  ScalarField(const ScalarField& other) { copy_from(other); }
  ScalarField& operator=(const ScalarField& other) {
    if (this != &other) copy_from(other);
    return *this;
  }
  ScalarField(ScalarField&& other) noexcept { move_from(std::move(other)); }
  ScalarField& operator=(ScalarField&& other) noexcept {
    if (this != &other) move_from(std::move(other));
    return *this;
  }

  const Grid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return grid_.size(); }

  std::span<const double> values() const {
    std::lock_guard lock(sync_);
    if (!has_values_) {
      values_.assign(grid_.size(), 0.0);
      detail::inverse(grid_, spectral_, values_);
      has_values_ = true;
    }
    return values_;
  }

  std::span<const cplx> spectral() const {
    std::lock_guard lock(sync_);
    if (!has_spectral_) {
      spectral_.assign(grid_.size(), cplx{});
      detail::forward(grid_, values_, spectral_);
      has_spectral_ = true;
    }
    return spectral_;
  }

  /// Physical samples become authoritative.
  std::span<double> mutable_values() {
    (void)values();
    has_spectral_ = false;
    return values_;
  }

  /// Fourier coefficients become authoritative.
  std::span<cplx> mutable_spectral() {
    (void)spectral();
    has_values_ = false;
    return spectral_;
  }

  bool values_current() const noexcept { return has_values_; }
  bool spectral_current() const noexcept { return has_spectral_; }

  /// Makes the sampled values the single source of truth, so that a field
  /// rebuilt from its samples behaves bit-identically.
  void canonicalize() {
    (void)values();
    has_spectral_ = false;
    spectral_.clear();
  }

  double operator[](std::size_t i) const { return values()[i]; }

  double mean() const {
    auto v = values();
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  }

  double max_norm() const {
    auto v = values();
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
  }

  bool is_finite() const {
    auto v = values();
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  }

  double max_abs() const {
    double m = 0.0;
    for (double x : values()) m = std::max(m, std::abs(x));
    return m;
  }

  ScalarField& operator+=(const ScalarField& o) { return combine(o, 1.0); }
  ScalarField& operator-=(const ScalarField& o) { return combine(o, -1.0); }
  ScalarField& operator*=(double a) {
    for (double& x : mutable_values()) x *= a;
    return *this;
  }
  /// this += a * o
  ScalarField& axpy(double a, const ScalarField& o) { return combine(o, a); }

  friend ScalarField operator+(ScalarField a, const ScalarField& b) { return a += b; }
  friend ScalarField operator-(ScalarField a, const ScalarField& b) { return a -= b; }
  friend ScalarField operator*(double s, ScalarField a) { return a *= s; }
  friend ScalarField operator*(ScalarField a, double s) { return a *= s; }

 private:
  ScalarField& combine(const ScalarField& o, double a) {
    if (!(o.grid_ == grid_)) throw GridMismatch();
    auto src = o.values();
    auto dst = mutable_values();
    for (std::size_t i = 0; i < dst.size(); ++i) dst[i] += a * src[i];
    return *this;
  }

  void copy_from(const ScalarField& o) {
    std::lock_guard lock(o.sync_);
    grid_ = o.grid_;
    values_ = o.values_;
    spectral_ = o.spectral_;
    has_values_ = o.has_values_;
    has_spectral_ = o.has_spectral_;
  }

  void move_from(ScalarField&& o) noexcept {
    grid_ = o.grid_;
    values_ = std::move(o.values_);
    spectral_ = std::move(o.spectral_);
    has_values_ = o.has_values_;
    has_spectral_ = o.has_spectral_;
  }

  Grid grid_{1, 8, 1.0};
  mutable std::vector<double> values_;
  mutable std::vector<cplx> spectral_;
  mutable bool has_values_ = true;
  mutable bool has_spectral_ = false;
  mutable std::mutex sync_;
};

/// d scalar components on one grid.
class VectorField {
 public:
  explicit VectorField(Grid grid) : grid_(grid) {
    components_.assign(static_cast<std::size_t>(grid.dim()), ScalarField(grid));
  }
  explicit VectorField(std::vector<ScalarField> components) : grid_(components.at(0).grid()) {
    if (static_cast<int>(components.size()) != grid_.dim())
      throw std::invalid_argument("vector field needs one component per dimension");
    for (const auto& c : components)
      if (!(c.grid() == grid_)) throw GridMismatch();
    components_ = std::move(components);
  }

  const Grid& grid() const noexcept { return grid_; }
  int dim() const noexcept { return grid_.dim(); }
  ScalarField& operator[](int i) { return components_.at(static_cast<std::size_t>(i)); }
  const ScalarField& operator[](int i) const { return components_.at(static_cast<std::size_t>(i)); }
  std::span<const ScalarField> components() const noexcept { return components_; }

  void canonicalize() {
    for (auto& c : components_) c.canonicalize();
  }
  bool is_finite() const {
    return std::all_of(components_.begin(), components_.end(),
                       [](const ScalarField& c) { return c.is_finite(); });
  }

  /// max over grid points of the Euclidean magnitude.
  double max_norm() const {
    double m = 0.0;
    for (std::size_t i = 0; i < grid_.size(); ++i) {
      double s = 0.0;
      for (const auto& c : components_) s += c[i] * c[i];
      m = std::max(m, std::sqrt(s));
    }
    return m;
  }

  VectorField& operator+=(const VectorField& o) {
    check(o);
    for (int i = 0; i < dim(); ++i) (*this)[i] += o[i];
    return *this;
  }
  VectorField& operator-=(const VectorField& o) {
    check(o);
    for (int i = 0; i < dim(); ++i) (*this)[i] -= o[i];
    return *this;
  }
  VectorField& operator*=(double a) {
    for (auto& c : components_) c *= a;
    return *this;
  }
  VectorField& axpy(double a, const VectorField& o) {
    check(o);
    for (int i = 0; i < dim(); ++i) (*this)[i].axpy(a, o[i]);
    return *this;
  }
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }

 private:
  void check(const VectorField& o) const {
    if (!(o.grid_ == grid_)) throw GridMismatch();
  }

  Grid grid_;
  std::vector<ScalarField> components_;
};

inline void require_same_grid(const Grid& a, const Grid& b) {
  if (!(a == b)) throw GridMismatch();
}

}  // namespace frfl
