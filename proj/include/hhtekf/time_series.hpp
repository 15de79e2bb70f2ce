#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace hhtekf {

// Base for every error the library raises. `stage()` names the pipeline stage
// ("emd", "hilbert", "ekf.init", ...) so front ends can label diagnostics.
class Error : public std::runtime_error {
public:
  Error(std::string stage, const std::string& what)
      : std::runtime_error(what), stage_(std::move(stage)) {}

  const std::string& stage() const noexcept { return stage_; }

private:
  std::string stage_;
};

class InvalidArgument : public Error {
public:
  using Error::Error;
};

// Uniformly sampled real-valued signal.
struct TimeSeries {
  std::vector<double> samples;
  double sample_rate_hz = 1.0;
  long start_index = 0;

  std::size_t size() const noexcept { return samples.size(); }
  double duration_s() const noexcept {
    return static_cast<double>(samples.size()) / sample_rate_hz;
  }
};

// Throws InvalidArgument unless the series is non-empty, has a positive finite
// rate and only finite samples.
void validate(const TimeSeries& series, const std::string& stage);

bool all_finite(std::span<const double> values) noexcept;

}  // namespace hhtekf
