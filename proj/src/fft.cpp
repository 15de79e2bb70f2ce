#include "hhtekf/fft.hpp"

#include <fftw3.h>

#include <cmath>
#include <mutex>
#include <numbers>

namespace hhtekf::fft {

namespace {

// FFTW's planner is not reentrant; execution of an existing plan is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}

std::vector<Complex> transform(std::span<const Complex> x, int sign) {
  const auto n = x.size();
  std::vector<Complex> out(n);
  if (n == 0) {
    return out;
  }
  std::vector<Complex> in(x.begin(), x.end());
  auto* in_ptr = reinterpret_cast<fftw_complex*>(in.data());
  auto* out_ptr = reinterpret_cast<fftw_complex*>(out.data());
  fftw_plan plan;
  {
    std::lock_guard lock(planner_mutex());
    plan = fftw_plan_dft_1d(static_cast<int>(n), in_ptr, out_ptr, sign, FFTW_ESTIMATE);
  }
  fftw_execute(plan);
  {
    std::lock_guard lock(planner_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

}  // namespace

std::vector<Complex> forward(std::span<const Complex> x) {
  return transform(x, FFTW_FORWARD);
}

std::vector<Complex> inverse(std::span<const Complex> spectrum) {
  auto out = transform(spectrum, FFTW_BACKWARD);
  const double scale = out.empty() ? 1.0 : 1.0 / static_cast<double>(out.size());
  for (auto& v : out) {
    v *= scale;
  }
  return out;
}

std::vector<Complex> forward_real(std::span<const double> x, std::size_t n_fft) {
  std::vector<Complex> padded(n_fft, Complex{0.0, 0.0});
  for (std::size_t k = 0; k < std::min(n_fft, x.size()); ++k) {
    padded[k] = x[k];
  }
  return forward(padded);
}

std::vector<double> hann(std::size_t n) {
  std::vector<double> w(n, 1.0);
  if (n < 2) {
    return w;
  }
  for (std::size_t k = 0; k < n; ++k) {
    w[k] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(k) /
                                static_cast<double>(n - 1));
  }
  return w;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) {
    p <<= 1;
  }
  return p;
}

}  // namespace hhtekf::fft
