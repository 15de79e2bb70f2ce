#pragma once

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "hhtekf/emd.hpp"
#include "hhtekf/time_series.hpp"

namespace hhtekf::hilbert {

using Complex = std::complex<double>;

struct InstantaneousTrace {
  std::vector<double> freq_rad_s;
  std::vector<double> amplitude;
  std::vector<double> damping_per_s;
  std::pair<std::size_t, std::size_t> valid_range{0, 0};  // inclusive

  // Mean frequency over valid_range.
  double mean_valid_freq() const;
};

struct HhtConfig {
  emd::EmdConfig emd;
  double dc_cutoff_hz = 0.1;
  // An IMF completing fewer cycles than this over the record is also treated as
  // trend: the effective cutoff is max(dc_cutoff_hz, trend_min_cycles / T).
  double trend_min_cycles = 2.5;
  double end_margin = 0.05;  // fraction trimmed from each end for valid_range
  // Masking: mask frequency and amplitude as multiples of the dominant tone's
  // frequency and RMS amplitude. An explicit mask overrides the ratios.
  double mask_freq_ratio = 1.6;
  double mask_amp_ratio = 1.6;
  std::optional<double> mask_freq_rad_s;
  std::optional<double> mask_amp;
};

// Cutoff in Hz below which an IMF counts as DC/trend for a record of n samples.
double effective_dc_cutoff_hz(const HhtConfig& config, std::size_t n, double fs);

struct HhtComponent {
  emd::Imf imf;
  InstantaneousTrace trace;
  bool is_dc = false;
};

struct HhtResult {
  std::vector<HhtComponent> components;
  std::vector<double> residue;
  double sample_rate_hz = 1.0;
  // Mask actually applied by masking_hht (zero for plain hht).
  double mask_freq_rad_s = 0.0;
  double mask_amp = 0.0;

  std::vector<const HhtComponent*> oscillatory() const;
};

// Frequency-domain analytic signal: zero negative frequencies, double the
// positive ones, keep DC and Nyquist.
std::vector<Complex> analytic_signal(std::span<const double> x);

InstantaneousTrace instantaneous(std::span<const Complex> z, double fs,
                                 double end_margin = 0.05);

HhtResult hht(const TimeSeries& x, const HhtConfig& config = {});

// hht with the first IMF taken from emd::masking_emd.
HhtResult masking_hht(const TimeSeries& x, const HhtConfig& config = {});

}  // namespace hhtekf::hilbert
