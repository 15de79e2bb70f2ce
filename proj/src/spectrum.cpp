#include "hhtekf/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "hhtekf/fft.hpp"

namespace hhtekf::spectrum {

namespace {

std::vector<double> demeaned(std::span<const double> x) {
  std::vector<double> out(x.begin(), x.end());
  if (out.empty()) {
    return out;
  }
  const double mean = std::accumulate(out.begin(), out.end(), 0.0) / static_cast<double>(out.size());
  for (auto& v : out) {
    v -= mean;
  }
  return out;
}

}  // namespace

std::complex<double> windowed_tone(std::span<const double> x, double fs, double freq_rad_s) {
  const auto y = demeaned(x);
  const auto w = fft::hann(y.size());
  const double gain = std::accumulate(w.begin(), w.end(), 0.0);
  std::complex<double> acc{0.0, 0.0};
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double arg = -freq_rad_s * static_cast<double>(k) / fs;
    acc += w[k] * y[k] * std::complex<double>(std::cos(arg), std::sin(arg));
  }
  return gain > 0.0 ? 2.0 * acc / gain : acc;
}

std::vector<Peak> find_peaks(std::span<const double> x, double fs, const PeakConfig& config) {
  std::vector<Peak> peaks;
  if (x.size() < 4) {
    return peaks;
  }
  auto y = demeaned(x);
  const auto w = fft::hann(y.size());
  for (std::size_t k = 0; k < y.size(); ++k) {
    y[k] *= w[k];
  }
  const std::size_t n_fft = std::max(config.min_fft_size, 8 * fft::next_pow2(y.size()));
  const auto bins = fft::forward_real(y, n_fft);
  const std::size_t half = n_fft / 2;
  std::vector<double> mag(half + 1);
  for (std::size_t m = 0; m <= half; ++m) {
    mag[m] = std::abs(bins[m]);
  }
  const double bin_hz = fs / static_cast<double>(n_fft);
  const auto first = static_cast<std::size_t>(std::ceil(config.min_freq_hz / bin_hz));
  if (first + 2 > half) {
    return peaks;
  }

  std::vector<double> band(mag.begin() + static_cast<long>(first), mag.end());
  auto mid = band.begin() + static_cast<long>(band.size() / 2);
  std::nth_element(band.begin(), mid, band.end());
  const double strongest = *std::max_element(mag.begin() + static_cast<long>(first), mag.end());
  if (strongest <= 0.0) {
    return peaks;
  }
  const double threshold = std::max(config.threshold_ratio * *mid, config.dynamic_range * strongest);

  std::vector<std::size_t> candidates;
  for (std::size_t m = std::max<std::size_t>(first, 1); m < half; ++m) {
    if (mag[m] > threshold && mag[m] > mag[m - 1] && mag[m] >= mag[m + 1]) {
      candidates.push_back(m);
    }
  }
  std::sort(candidates.begin(), candidates.end(),
            [&](std::size_t a, std::size_t b) { return mag[a] > mag[b]; });

  for (auto m : candidates) {
    if (peaks.size() >= config.max_peaks) {
      break;
    }
    // Parabolic refinement on log magnitude.
    const double la = std::log(mag[m - 1]);
    const double lb = std::log(mag[m]);
    const double lc = std::log(mag[m + 1]);
    const double denom = la - 2.0 * lb + lc;
    const double delta = denom != 0.0 ? std::clamp(0.5 * (la - lc) / denom, -0.5, 0.5) : 0.0;
    const double freq_hz = (static_cast<double>(m) + delta) * bin_hz;
    const bool too_close = std::any_of(peaks.begin(), peaks.end(), [&](const Peak& p) {
      return std::abs(p.freq_rad_s / (2.0 * std::numbers::pi) - freq_hz) < config.min_separation_hz;
    });
    if (too_close) {
      continue;
    }
    const double omega = 2.0 * std::numbers::pi * freq_hz;
    const auto tone = windowed_tone(x, fs, omega);
    peaks.push_back(Peak{omega, std::abs(tone), std::arg(tone), mag[m]});
  }
  return peaks;
}

}  // namespace hhtekf::spectrum
