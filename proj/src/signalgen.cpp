#include "hhtekf/signalgen.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hhtekf::signalgen {

namespace {

constexpr const char* kStage = "signalgen";

}  // namespace

// Uniform in (0, 1], 53 random bits.
double GaussianStream::uniform_open() {
  return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
}

double GaussianStream::next() {
  if (has_cached_) {
    has_cached_ = false;
    return cached_;
  }
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  cached_ = radius * std::sin(angle);
  has_cached_ = true;
  return radius * std::cos(angle);
}

std::vector<double> gaussian_noise(std::size_t n, double noise_std,
                                   std::uint64_t seed) {
  std::vector<double> out(n, 0.0);
  if (noise_std == 0.0) {
    return out;
  }
  GaussianStream stream(seed);
  for (auto& v : out) {
    v = noise_std * stream.next();
  }
  return out;
}

Scenario synthesize(const std::vector<ModeSpec>& modes, std::size_t n, double fs,
                    std::optional<StepJump> step, double noise_std,
                    std::uint64_t seed) {
  if (n < 2) {
    throw InvalidArgument(kStage, "need at least 2 samples");
  }
  if (!(fs > 0.0) || !std::isfinite(fs)) {
    throw InvalidArgument(kStage, "sample rate must be positive and finite");
  }
  if (!std::isfinite(noise_std) || noise_std < 0.0) {
    throw InvalidArgument(kStage, "noise_std must be finite and non-negative");
  }
  if (step && !std::isfinite(step->value)) {
    throw InvalidArgument(kStage, "step value must be finite");
  }
  const double nyquist = std::numbers::pi * fs;
  for (std::size_t l = 0; l < modes.size(); ++l) {
    const auto& m = modes[l];
    if (!std::isfinite(m.amplitude) || !std::isfinite(m.damping_per_s) ||
        !std::isfinite(m.phase_rad) || !std::isfinite(m.freq_rad_s)) {
      throw InvalidArgument(kStage, "mode " + std::to_string(l) + " has non-finite parameters");
    }
    const double lo = m.freq_ramp ? std::min(m.freq_ramp->start_rad_s, m.freq_ramp->end_rad_s)
                                  : m.freq_rad_s;
    const double hi = m.freq_ramp ? std::max(m.freq_ramp->start_rad_s, m.freq_ramp->end_rad_s)
                                  : m.freq_rad_s;
    if (m.freq_ramp && (!std::isfinite(lo) || !std::isfinite(hi))) {
      throw InvalidArgument(kStage, "mode " + std::to_string(l) + " has a non-finite ramp");
    }
    if (!(lo > 0.0)) {
      throw InvalidArgument(kStage, "mode " + std::to_string(l) + " frequency must be positive");
    }
    if (hi >= nyquist) {
      throw InvalidArgument(kStage, "mode " + std::to_string(l) + " is at or above Nyquist");
    }
  }

  Scenario out;
  out.series.sample_rate_hz = fs;
  out.series.samples.assign(n, 0.0);
  out.truth.step = step;
  out.truth.freq_rad_s.assign(modes.size(), std::vector<double>(n));
  out.truth.damping_per_s.assign(modes.size(), std::vector<double>(n));

  const double nd = static_cast<double>(n);
  for (std::size_t l = 0; l < modes.size(); ++l) {
    const auto& m = modes[l];
    for (std::size_t k = 0; k < n; ++k) {
      const double kd = static_cast<double>(k);
      const double omega =
          m.freq_ramp ? m.freq_ramp->start_rad_s +
                            (m.freq_ramp->end_rad_s - m.freq_ramp->start_rad_s) * kd / nd
                      : m.freq_rad_s;
      // The ramp phase is omega[k] * k / fs, not the integral of omega.
      const double theta = omega * kd / fs + m.phase_rad;
      out.series.samples[k] +=
          m.amplitude * std::exp(-m.damping_per_s * kd / fs) * std::cos(theta);
      out.truth.freq_rad_s[l][k] = omega;
      out.truth.damping_per_s[l][k] = m.damping_per_s;
    }
  }
  if (step) {
    for (std::size_t k = 0; k < n; ++k) {
      if (static_cast<long>(k) > step->onset_index) {
        out.series.samples[k] += step->value;
      }
    }
  }
  const auto noise = gaussian_noise(n, noise_std, seed);
  for (std::size_t k = 0; k < n; ++k) {
    out.series.samples[k] += noise[k];
  }
  return out;
}

std::vector<ModeSpec> case_a_modes() {
  using std::numbers::pi;
  return {
      ModeSpec{.amplitude = 1.0, .damping_per_s = -0.1, .freq_rad_s = 2.0 * pi, .phase_rad = 0.0, .freq_ramp = std::nullopt},
      ModeSpec{.amplitude = 1.0, .damping_per_s = 0.01, .freq_rad_s = 3.0 * pi, .phase_rad = pi / 3.0, .freq_ramp = std::nullopt},
  };
}

std::vector<ModeSpec> case_b_modes() {
  using std::numbers::pi;
  ModeSpec mode{.amplitude = 1.0, .damping_per_s = 0.0, .freq_rad_s = 2.0 * pi * 1.5, .phase_rad = 0.0, .freq_ramp = std::nullopt};
  mode.freq_ramp = FreqRamp{2.0 * pi * 1.5, 2.0 * pi * 2.0};
  return {mode};
}

namespace {

StepJump case_step() {
  return StepJump{static_cast<long>(kCaseLength / 2), kCaseStepValue};
}

}  // namespace

Scenario case_a(double noise_std, std::uint64_t seed) {
  return synthesize(case_a_modes(), kCaseLength, kCaseSampleRateHz, case_step(), noise_std, seed);
}

Scenario case_b(double noise_std, std::uint64_t seed) {
  return synthesize(case_b_modes(), kCaseLength, kCaseSampleRateHz, case_step(), noise_std, seed);
}

}  // namespace hhtekf::signalgen
