#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "hhtekf/time_series.hpp"

namespace hhtekf::emd {

// Raised by sift() when the input has too few extrema to define envelopes;
// the caller treats the input as the final residue.
class ResidueReached : public Error {
public:
  explicit ResidueReached(const std::string& what) : Error("emd", what) {}
};

struct Extrema {
  std::vector<std::size_t> maxima;
  std::vector<std::size_t> minima;
};

struct EmdConfig {
  double sd_threshold = 0.2;
  int max_sift_iters = 64;
  std::size_t max_imfs = 10;
  // Decomposition stops once the residue has fewer interior extrema than this.
  std::size_t min_residue_extrema = 3;
  // Decomposition also stops once the residue's RMS falls to this fraction of
  // the input's, so rounding dust is not sifted into IMFs.
  double negligible_residue = 1e-12;
  // Samples mirrored onto each end before building envelopes. Unset selects
  // min(n / 4, 2 * longest extremum-to-extremum period).
  std::optional<std::size_t> mirror_length;
};

struct Imf {
  std::vector<double> samples;
  int index = 0;  // 1 = highest frequency
  bool converged = true;
  int sift_iterations = 0;
};

struct Decomposition {
  std::vector<Imf> imfs;
  std::vector<double> residue;
  double sample_rate_hz = 1.0;

  // Sum of all IMFs and the residue.
  std::vector<double> reconstruct() const;
};

struct SiftResult {
  std::vector<double> imf;
  bool converged = false;
  int iterations = 0;
};

// Strict local extrema; a flat run that is above (below) both flanks counts as
// one maximum (minimum) at its midpoint. Endpoints are never extrema.
Extrema find_extrema(std::span<const double> x);

std::size_t count_zero_crossings(std::span<const double> x);

// |#extrema - #zero crossings| <= 1.
bool satisfies_imf_property(std::span<const double> x);

// Natural cubic spline through (knot_x[i], knot_y[i]) evaluated at `at`.
// knot_x must be strictly increasing with at least two entries. Points outside
// the knot range continue linearly.
std::vector<double> natural_cubic_spline(std::span<const double> knot_x,
                                         std::span<const double> knot_y,
                                         std::span<const double> at);

// Spline through (i, x[i]) for every i in `indices`, evaluated at 0..len(x)-1.
std::vector<double> envelope(std::span<const double> x,
                             std::span<const std::size_t> indices);

// Even-symmetric reflection of n_ext samples about each endpoint; the endpoint
// itself is not repeated. Requires n_ext <= len(x) - 1.
std::vector<double> mirror_extend(std::span<const double> x, std::size_t n_ext);

std::size_t default_mirror_length(std::span<const double> x);

SiftResult sift(std::span<const double> x, const EmdConfig& config = {});

Decomposition emd(const TimeSeries& x, const EmdConfig& config = {});

// First IMF extracted with a masking sinusoid m[k] = amp * sin(freq * k / fs):
// the mean of sift(x + m) and sift(x - m). amp == 0 is a plain sift.
std::vector<double> masking_emd(const TimeSeries& x, double mask_freq_rad_s,
                                double mask_amp, const EmdConfig& config = {});

}  // namespace hhtekf::emd
