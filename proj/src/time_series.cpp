#include "hhtekf/time_series.hpp"

#include <algorithm>
#include <cmath>

namespace hhtekf {

bool all_finite(std::span<const double> values) noexcept {
  return std::all_of(values.begin(), values.end(),
                     [](double v) { return std::isfinite(v); });
}

void validate(const TimeSeries& series, const std::string& stage) {
  if (series.samples.empty()) {
    throw InvalidArgument(stage, "time series is empty");
  }
  if (!(series.sample_rate_hz > 0.0) || !std::isfinite(series.sample_rate_hz)) {
    throw InvalidArgument(stage, "sample rate must be positive and finite");
  }
  if (!all_finite(series.samples)) {
    throw InvalidArgument(stage, "time series contains non-finite samples");
  }
}

}  // namespace hhtekf
