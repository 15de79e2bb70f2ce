#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace hhtekf::spectrum {

// A spectral line located on a Hann-windowed, zero-padded DFT and refined by
// parabolic interpolation. Amplitude and phase describe A * cos(w k / fs + phi)
// referenced to sample 0.
struct Peak {
  double freq_rad_s = 0.0;
  double amplitude = 0.0;
  double phase_rad = 0.0;
  double magnitude = 0.0;  // windowed DFT magnitude at the refined frequency
};

struct PeakConfig {
  std::size_t max_peaks = 4;
  double min_separation_hz = 0.3;
  double threshold_ratio = 4.0;  // relative to the median magnitude
  // Peaks below this fraction of the strongest one are taken as window
  // leakage. Matters for clean signals, whose median magnitude is tiny.
  double dynamic_range = 0.01;
  double min_freq_hz = 0.0;
  std::size_t min_fft_size = 4096;
};

// Peaks in decreasing magnitude order. The mean of x is removed first. Only
// local maxima above threshold_ratio * median(|X|) over [min_freq_hz, fs/2]
// and above dynamic_range * the largest magnitude there qualify. Empty when
// nothing clears the threshold.
std::vector<Peak> find_peaks(std::span<const double> x, double fs, const PeakConfig& config);

// Hann-windowed DTFT of the mean-removed x at one frequency, normalized so a
// unit cosine at that frequency gives magnitude 1.
std::complex<double> windowed_tone(std::span<const double> x, double fs, double freq_rad_s);

}  // namespace hhtekf::spectrum
