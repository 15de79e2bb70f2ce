#include "hhtekf/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "hhtekf/fft.hpp"
#include "hhtekf/spectrum.hpp"

namespace hhtekf::hilbert {

namespace {

constexpr const char* kStage = "hilbert";

std::vector<HhtComponent> analyze_imfs(std::vector<emd::Imf> imfs, double fs,
                                       const HhtConfig& config) {
  std::vector<HhtComponent> out;
  out.reserve(imfs.size());
  const std::size_t n = imfs.empty() ? 0 : imfs.front().samples.size();
  const double dc_rad_s = 2.0 * std::numbers::pi * effective_dc_cutoff_hz(config, n, fs);
  for (auto& imf : imfs) {
    HhtComponent c;
    c.trace = instantaneous(analytic_signal(imf.samples), fs, config.end_margin);
    c.is_dc = c.trace.mean_valid_freq() < dc_rad_s;
    c.imf = std::move(imf);
    out.push_back(std::move(c));
  }
  return out;
}

}  // namespace

double effective_dc_cutoff_hz(const HhtConfig& config, std::size_t n, double fs) {
  const double duration = static_cast<double>(n) / fs;
  const double by_length = duration > 0.0 ? config.trend_min_cycles / duration : 0.0;
  return std::max(config.dc_cutoff_hz, by_length);
}

double InstantaneousTrace::mean_valid_freq() const {
  if (freq_rad_s.empty()) {
    return 0.0;
  }
  double sum = 0.0;
  for (std::size_t k = valid_range.first; k <= valid_range.second; ++k) {
    sum += freq_rad_s[k];
  }
  return sum / static_cast<double>(valid_range.second - valid_range.first + 1);
}

std::vector<const HhtComponent*> HhtResult::oscillatory() const {
  std::vector<const HhtComponent*> out;
  for (const auto& c : components) {
    if (!c.is_dc) {
      out.push_back(&c);
    }
  }
  return out;
}

std::vector<Complex> analytic_signal(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 4) {
    throw InvalidArgument(kStage, "analytic signal needs at least 4 samples");
  }
  auto spectrum = fft::forward_real(x, n);
  const std::size_t positive_end = (n % 2 == 0) ? n / 2 : (n + 1) / 2;  // exclusive
  for (std::size_t m = 1; m < positive_end; ++m) {
    spectrum[m] *= 2.0;
  }
  for (std::size_t m = (n % 2 == 0) ? n / 2 + 1 : positive_end; m < n; ++m) {
    spectrum[m] = 0.0;
  }
  return fft::inverse(spectrum);
}

InstantaneousTrace instantaneous(std::span<const Complex> z, double fs, double end_margin) {
  const std::size_t n = z.size();
  if (n < 2) {
    throw InvalidArgument(kStage, "instantaneous attributes need at least 2 samples");
  }
  if (!(fs > 0.0)) {
    throw InvalidArgument(kStage, "sample rate must be positive");
  }
  InstantaneousTrace t;
  t.amplitude.resize(n);
  t.freq_rad_s.resize(n);
  t.damping_per_s.resize(n);
  std::vector<double> phase(n), log_amp(n);
  for (std::size_t k = 0; k < n; ++k) {
    t.amplitude[k] = std::abs(z[k]);
    if (!(t.amplitude[k] > 0.0)) {
      throw Error(kStage, "analytic signal has zero magnitude at sample " + std::to_string(k));
    }
    log_amp[k] = std::log(t.amplitude[k]);
    phase[k] = std::arg(z[k]);
    if (k > 0) {
      double d = phase[k] - phase[k - 1];
      d -= 2.0 * std::numbers::pi * std::round(d / (2.0 * std::numbers::pi));
      phase[k] = phase[k - 1] + d;
    }
  }
  auto derivative = [&](const std::vector<double>& v, std::size_t k) {
    if (k == 0) {
      return (v[1] - v[0]) * fs;
    }
    if (k == n - 1) {
      return (v[n - 1] - v[n - 2]) * fs;
    }
    return (v[k + 1] - v[k - 1]) * 0.5 * fs;
  };
  for (std::size_t k = 0; k < n; ++k) {
    t.freq_rad_s[k] = derivative(phase, k);
    t.damping_per_s[k] = -derivative(log_amp, k);
  }
  const auto margin = static_cast<std::size_t>(std::floor(end_margin * static_cast<double>(n)));
  t.valid_range = margin * 2 < n ? std::pair{margin, n - 1 - margin} : std::pair{std::size_t{0}, n - 1};
  return t;
}

HhtResult hht(const TimeSeries& x, const HhtConfig& config) {
  auto decomposition = emd::emd(x, config.emd);
  HhtResult out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.residue = std::move(decomposition.residue);
  out.components = analyze_imfs(std::move(decomposition.imfs), x.sample_rate_hz, config);
  return out;
}

HhtResult masking_hht(const TimeSeries& x, const HhtConfig& config) {
  validate(x, kStage);
  const double fs = x.sample_rate_hz;
  double mask_freq = config.mask_freq_rad_s.value_or(0.0);
  double mask_amp = config.mask_amp.value_or(0.0);
  if (!config.mask_freq_rad_s || !config.mask_amp) {
    // Dominant tone of the signal with its trend (residue and DC IMFs) removed.
    const auto plain = hht(x, config);
    std::vector<double> oscillation(x.size(), 0.0);
    for (const auto* c : plain.oscillatory()) {
      for (std::size_t k = 0; k < oscillation.size(); ++k) {
        oscillation[k] += c->imf.samples[k];
      }
    }
    spectrum::PeakConfig peak_cfg;
    peak_cfg.max_peaks = 1;
    peak_cfg.threshold_ratio = 0.0;
    peak_cfg.min_freq_hz = config.dc_cutoff_hz;
    const auto peaks = spectrum::find_peaks(oscillation, fs, peak_cfg);
    if (!peaks.empty()) {
      if (!config.mask_freq_rad_s) {
        mask_freq = std::min(config.mask_freq_ratio * peaks.front().freq_rad_s,
                             0.9 * std::numbers::pi * fs);
      }
      if (!config.mask_amp) {
        mask_amp = config.mask_amp_ratio * peaks.front().amplitude / std::numbers::sqrt2;
      }
    }
  }

  HhtResult out;
  out.sample_rate_hz = fs;
  out.mask_freq_rad_s = mask_amp > 0.0 ? mask_freq : 0.0;
  out.mask_amp = mask_amp;

  std::vector<emd::Imf> imfs;
  TimeSeries remainder = x;
  try {
    auto first = emd::masking_emd(x, mask_freq, mask_amp, config.emd);
    for (std::size_t k = 0; k < remainder.size(); ++k) {
      remainder.samples[k] -= first[k];
    }
    imfs.push_back(emd::Imf{std::move(first), 1, true, 0});
  } catch (const emd::ResidueReached&) {
    out.residue = x.samples;
    return out;
  }
  auto rest_config = config.emd;
  rest_config.max_imfs = config.emd.max_imfs > 0 ? config.emd.max_imfs - 1 : 0;
  auto rest = emd::emd(remainder, rest_config);
  for (auto& imf : rest.imfs) {
    imf.index += 1;
    imfs.push_back(std::move(imf));
  }
  out.residue = std::move(rest.residue);
  out.components = analyze_imfs(std::move(imfs), fs, config);
  return out;
}

}  // namespace hhtekf::hilbert
