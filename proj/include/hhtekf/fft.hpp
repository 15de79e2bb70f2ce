#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hhtekf::fft {

using Complex = std::complex<double>;

// Unnormalized forward DFT: X[m] = sum_k x[k] exp(-2 pi j m k / n).
std::vector<Complex> forward(std::span<const Complex> x);

// Inverse DFT including the 1/n factor, so inverse(forward(x)) == x.
std::vector<Complex> inverse(std::span<const Complex> spectrum);

// Forward DFT of a real sequence zero-padded (or truncated) to n_fft points.
// Returns all n_fft bins.
std::vector<Complex> forward_real(std::span<const double> x, std::size_t n_fft);

// Hann window of length n (periodic=false, symmetric form).
std::vector<double> hann(std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace hhtekf::fft
