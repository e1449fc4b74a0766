#pragma once

#include <fftw3.h>

#include <complex>
#include <map>
#include <mutex>
#include <span>
#include <tuple>
#include <vector>

#include "grid.hpp"

namespace frfl::detail {

using cplx = std::complex<double>;

// FFTW planning is not thread-safe; execution through fftw_execute_dft is.
// Plans live for the whole process.
class FftPlans {
 public:
  static FftPlans& instance() {
    static FftPlans plans;
    return plans;
  }

  fftw_plan get(int dim, int n, int sign) {
    std::lock_guard lock(mutex_);
    auto key = std::make_tuple(dim, n, sign);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    std::size_t total = dim == 1 ? n : static_cast<std::size_t>(n) * n;
    std::vector<cplx> a(total), b(total);
    auto* in = reinterpret_cast<fftw_complex*>(a.data());
    auto* out = reinterpret_cast<fftw_complex*>(b.data());
    unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
    fftw_plan p = dim == 1 ? fftw_plan_dft_1d(n, in, out, sign, flags)
                           : fftw_plan_dft_2d(n, n, in, out, sign, flags);
    plans_.emplace(key, p);
    return p;
  }

 private:
  FftPlans() = default;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, fftw_plan> plans_;
};

/// Unnormalised complex transform of an n or n x n array.
inline void transform(int dim, int n, int sign, std::span<const cplx> in, std::span<cplx> out) {
  std::vector<cplx> src(in.begin(), in.end());
  fftw_execute_dft(FftPlans::instance().get(dim, n, sign), reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
}

/// Coefficients c_k = N^{-d} sum_x f(x) e^{-ik.x}, so f = sum_k c_k e^{ik.x}.
inline void forward(const Grid& g, std::span<const double> in, std::span<cplx> out) {
  std::vector<cplx> buf(in.begin(), in.end());
  fftw_execute_dft(FftPlans::instance().get(g.dim(), g.n(), FFTW_FORWARD),
                   reinterpret_cast<fftw_complex*>(buf.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));
  const double scale = 1.0 / static_cast<double>(g.size());
  for (auto& c : out) c *= scale;
}

inline void inverse(const Grid& g, std::span<const cplx> in, std::span<double> out) {
  std::vector<cplx> src(in.begin(), in.end());
  std::vector<cplx> dst(in.size());
  fftw_execute_dft(FftPlans::instance().get(g.dim(), g.n(), FFTW_BACKWARD),
                   reinterpret_cast<fftw_complex*>(src.data()),
                   reinterpret_cast<fftw_complex*>(dst.data()));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = dst[i].real();
}

}  // namespace frfl::detail
