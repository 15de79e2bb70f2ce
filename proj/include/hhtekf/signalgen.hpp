#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <utility>
#include <vector>

#include "hhtekf/time_series.hpp"

namespace hhtekf::signalgen {

// Linear frequency ramp: omega[k] = start + (end - start) * k / n for a record of
// n samples, so `end_rad_s` is the value one sample past the record.
struct FreqRamp {
  double start_rad_s = 0.0;
  double end_rad_s = 0.0;
};

// One damped sinusoid A * exp(-sigma * k / fs) * cos(theta[k]).
struct ModeSpec {
  double amplitude = 1.0;
  double damping_per_s = 0.0;  // negative means growing
  double freq_rad_s = 0.0;
  double phase_rad = 0.0;
  std::optional<FreqRamp> freq_ramp;
};

struct StepJump {
  long onset_index = 0;  // active for k > onset_index
  double value = 0.0;
};

struct GroundTruth {
  std::vector<std::vector<double>> freq_rad_s;     // [mode][k]
  std::vector<std::vector<double>> damping_per_s;  // [mode][k]
  std::optional<StepJump> step;

  std::size_t n_modes() const noexcept { return freq_rad_s.size(); }
};

struct Scenario {
  TimeSeries series;
  GroundTruth truth;
};

// Standard normal variates from a fixed generator: std::mt19937_64 (whose output
// sequence the C++ standard pins exactly) feeding a Box-Muller transform. The
// standard library's normal_distribution is implementation-defined, so it is
// deliberately not used.
class GaussianStream {
public:
  explicit GaussianStream(std::uint64_t seed) : engine_(seed) {}
  double next();

private:
  double uniform_open();

  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool has_cached_ = false;
};

// n draws of N(0, noise_std^2) from the stream seeded by `seed`.
std::vector<double> gaussian_noise(std::size_t n, double noise_std,
                                   std::uint64_t seed);

Scenario synthesize(const std::vector<ModeSpec>& modes, std::size_t n, double fs,
                    std::optional<StepJump> step, double noise_std,
                    std::uint64_t seed);

// Two closely spaced damped tones (1.0 Hz growing, 1.5 Hz decaying) plus a +5
// step in the second half, fs = 30 Hz, N = 150.
Scenario case_a(double noise_std, std::uint64_t seed);
std::vector<ModeSpec> case_a_modes();

// One tone whose frequency ramps as 2*pi*(1.5 + 0.5 k / N), plus the same step.
Scenario case_b(double noise_std, std::uint64_t seed);
std::vector<ModeSpec> case_b_modes();

inline constexpr double kCaseSampleRateHz = 30.0;
inline constexpr std::size_t kCaseLength = 150;
inline constexpr double kCaseStepValue = 5.0;

}  // namespace hhtekf::signalgen
