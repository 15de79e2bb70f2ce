#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <optional>
#include <vector>

#include "hhtekf/hilbert.hpp"
#include "hhtekf/spectrum.hpp"
#include "hhtekf/time_series.hpp"

namespace hhtekf::ekf {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

// Each oscillation mode contributes a block of four states:
//   phasor cosine part, phasor sine part, frequency (rad/s), damping (1/s).
inline constexpr Eigen::Index kBlock = 4;
inline constexpr Eigen::Index kCos = 0;
inline constexpr Eigen::Index kSin = 1;
inline constexpr Eigen::Index kFreq = 2;
inline constexpr Eigen::Index kDamp = 3;

class DivergenceError : public Error {
public:
  DivergenceError(std::size_t sample_index, const std::string& what)
      : Error("ekf.filter", what), sample_index_(sample_index) {}
  std::size_t sample_index() const noexcept { return sample_index_; }

private:
  std::size_t sample_index_;
};

class NoOscillationError : public Error {
public:
  explicit NoOscillationError(const std::string& what) : Error("ekf.init", what) {}
};

struct EkfState {
  Vector x;
  Matrix P;
};

struct EkfConfig {
  std::size_t n_modes = 1;
  Matrix q;         // 4L x 4L process covariance
  double r = 1e-3;  // measurement variance
  Vector x0;        // prior mean for sample 0
  Matrix p0;        // prior covariance for sample 0
  double fs = 1.0;
  // Joseph-form covariance update; false applies P - K H P literally.
  bool robust_cov = true;
};

struct ModeTrack {
  std::vector<double> freq_rad_s;
  std::vector<double> damping_per_s;
  std::vector<double> recon;  // cosine part + sine part
  // sqrt(cos^2 + sin^2). Only a proxy for the envelope: the two phasor parts
  // carry different fixed gains in general.
  std::vector<double> amplitude_proxy;
};

struct ModeTrace {
  std::vector<ModeTrack> modes;
  std::vector<double> innovation;  // y[k] - H x[k|k-1]
  double sample_rate_hz = 1.0;
  EkfState final_state;
  double max_asymmetry = 0.0;  // largest |P - P^T| seen before symmetrizing
};

// One-step state prediction f(x).
Vector transition(const Vector& x, double fs);

// Block-diagonal Jacobian of transition() at x.
Matrix jacobian(const Vector& x, double fs);

// [1 1 0 0] repeated per mode.
RowVector observation_row(std::size_t n_modes);

// Process covariance with separate variances for the phasor states and the
// frequency/damping states. process_covariance(L, v, v) == v * I.
Matrix process_covariance(std::size_t n_modes, double phasor_var, double freq_damping_var);

struct PriorSpread {
  double phasor_var = 1.0;
  double freq_sd_hz = 0.2;
  double damping_sd = 0.1;
};

// Per mode diag(phasor_var, phasor_var, (2 pi freq_sd_hz)^2, damping_sd^2).
Matrix initial_covariance(std::size_t n_modes, const PriorSpread& spread = {});

// Throws InvalidArgument for inconsistent dimensions, non-PSD q, r <= 0 or a
// non-positive-definite p0.
void validate(const EkfConfig& cfg);

// Runs the filter over every sample: measurement update, record, predict.
ModeTrace filter(const TimeSeries& y, const EkfConfig& cfg);

struct Initialization {
  std::size_t n_modes = 0;
  Vector x0;
  Matrix p0;
  std::vector<spectrum::Peak> peaks;  // ascending frequency, one per mode
};

struct InitConfig {
  PriorSpread prior;
  double min_separation_hz = 0.3;
  double threshold_ratio = 4.0;
  double min_freq_hz = 0.0;
};

// Spectral-peak initialization. Each peak A cos(w k / fs + phi) becomes a mode
// whose phasor parts reproduce that cosine under transition(): the phasor has
// radius A / sqrt(2) at angle phi + pi / 4. Damping starts at zero.
Initialization initialize_from_fft(const TimeSeries& y, std::size_t l_max,
                                   const InitConfig& config = {});

struct PipelineConfig {
  hilbert::HhtConfig hht;
  std::size_t max_modes = 4;
  std::optional<std::size_t> n_modes;  // exact mode count to seek
  InitConfig init;
  double q_phasor = 1e-9;
  double q_freq_damping = 1e-9;
  double r = 1e-3;
  bool robust_cov = true;
};

struct PipelineResult {
  hilbert::HhtResult decomposition;
  std::vector<double> ekf_input;  // sum of non-DC IMFs
  std::vector<double> trend;      // residue plus DC IMFs
  Initialization init;
  ModeTrace trace;
};

// EMD, sum of the non-DC IMFs, spectral initialization, then filter().
// Errors carry the failing stage.
PipelineResult run_hht_ekf(const TimeSeries& y, const PipelineConfig& config = {});

}  // namespace hhtekf::ekf
