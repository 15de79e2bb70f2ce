#include "hhtekf/ekf.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hhtekf::ekf {

namespace {

Eigen::Index state_size(std::size_t n_modes) {
  return static_cast<Eigen::Index>(n_modes) * kBlock;
}

std::size_t mode_count(const Vector& x) {
  return static_cast<std::size_t>(x.size() / kBlock);
}

}  // namespace

Vector transition(const Vector& x, double fs) {
  Vector out(x.size());
  for (std::size_t l = 0; l < mode_count(x); ++l) {
    const Eigen::Index b = static_cast<Eigen::Index>(l) * kBlock;
    const double decay = std::exp(-x[b + kDamp] / fs);
    const double c = std::cos(x[b + kFreq] / fs);
    const double s = std::sin(x[b + kFreq] / fs);
    out[b + kCos] = decay * (c * x[b + kCos] - s * x[b + kSin]);
    out[b + kSin] = decay * (s * x[b + kCos] + c * x[b + kSin]);
    out[b + kFreq] = x[b + kFreq];
    out[b + kDamp] = x[b + kDamp];
  }
  return out;
}

Matrix jacobian(const Vector& x, double fs) {
  Matrix jac = Matrix::Zero(x.size(), x.size());
  for (std::size_t l = 0; l < mode_count(x); ++l) {
    const Eigen::Index b = static_cast<Eigen::Index>(l) * kBlock;
    const double decay = std::exp(-x[b + kDamp] / fs);
    const double c = std::cos(x[b + kFreq] / fs);
    const double s = std::sin(x[b + kFreq] / fs);
    const double xc = x[b + kCos];
    const double xs = x[b + kSin];
    const double next_c = decay * (c * xc - s * xs);
    const double next_s = decay * (s * xc + c * xs);

    jac(b + kCos, b + kCos) = decay * c;
    jac(b + kCos, b + kSin) = -decay * s;
    jac(b + kCos, b + kFreq) = -next_s / fs;
    jac(b + kCos, b + kDamp) = -next_c / fs;

    jac(b + kSin, b + kCos) = decay * s;
    jac(b + kSin, b + kSin) = decay * c;
    jac(b + kSin, b + kFreq) = next_c / fs;
    jac(b + kSin, b + kDamp) = -next_s / fs;

    jac(b + kFreq, b + kFreq) = 1.0;
    jac(b + kDamp, b + kDamp) = 1.0;
  }
  return jac;
}

RowVector observation_row(std::size_t n_modes) {
  RowVector h = RowVector::Zero(state_size(n_modes));
  for (std::size_t l = 0; l < n_modes; ++l) {
    const Eigen::Index b = static_cast<Eigen::Index>(l) * kBlock;
    h[b + kCos] = 1.0;
    h[b + kSin] = 1.0;
  }
  return h;
}

Matrix process_covariance(std::size_t n_modes, double phasor_var, double freq_damping_var) {
  Vector diag(state_size(n_modes));
  for (std::size_t l = 0; l < n_modes; ++l) {
    const Eigen::Index b = static_cast<Eigen::Index>(l) * kBlock;
    diag[b + kCos] = phasor_var;
    diag[b + kSin] = phasor_var;
    diag[b + kFreq] = freq_damping_var;
    diag[b + kDamp] = freq_damping_var;
  }
  return diag.asDiagonal();
}

Matrix initial_covariance(std::size_t n_modes, const PriorSpread& spread) {
  Vector diag(state_size(n_modes));
  const double freq_sd = 2.0 * std::numbers::pi * spread.freq_sd_hz;
  for (std::size_t l = 0; l < n_modes; ++l) {
    const Eigen::Index b = static_cast<Eigen::Index>(l) * kBlock;
    diag[b + kCos] = spread.phasor_var;
    diag[b + kSin] = spread.phasor_var;
    diag[b + kFreq] = freq_sd * freq_sd;
    diag[b + kDamp] = spread.damping_sd * spread.damping_sd;
  }
  return diag.asDiagonal();
}

void validate(const EkfConfig& cfg) {
  constexpr const char* stage = "ekf.config";
  if (cfg.n_modes < 1) {
    throw InvalidArgument(stage, "need at least one mode");
  }
  const Eigen::Index n = state_size(cfg.n_modes);
  if (cfg.x0.size() != n || cfg.p0.rows() != n || cfg.p0.cols() != n || cfg.q.rows() != n ||
      cfg.q.cols() != n) {
    throw InvalidArgument(stage, "x0, p0 and q must match 4 * n_modes");
  }
  if (!(cfg.fs > 0.0) || !std::isfinite(cfg.fs)) {
    throw InvalidArgument(stage, "sample rate must be positive and finite");
  }
  if (!(cfg.r > 0.0) || !std::isfinite(cfg.r)) {
    throw InvalidArgument(stage, "measurement variance r must be positive and finite");
  }
  if (!cfg.x0.allFinite() || !cfg.p0.allFinite() || !cfg.q.allFinite()) {
    throw InvalidArgument(stage, "x0, p0 and q must be finite");
  }
  const double tol = 1e-9 * std::max(1.0, cfg.q.cwiseAbs().maxCoeff());
  if ((cfg.q - cfg.q.transpose()).cwiseAbs().maxCoeff() > tol) {
    throw InvalidArgument(stage, "q must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cfg.q, Eigen::EigenvaluesOnly);
  if (eig.eigenvalues().minCoeff() < -tol) {
    throw InvalidArgument(stage, "q must be positive semidefinite");
  }
  if ((cfg.p0 - cfg.p0.transpose()).cwiseAbs().maxCoeff() >
      1e-9 * std::max(1.0, cfg.p0.cwiseAbs().maxCoeff())) {
    throw InvalidArgument(stage, "p0 must be symmetric");
  }
  Eigen::LLT<Matrix> llt(cfg.p0);
  if (llt.info() != Eigen::Success) {
    throw InvalidArgument(stage, "p0 must be positive definite");
  }
}

ModeTrace filter(const TimeSeries& y, const EkfConfig& cfg) {
  hhtekf::validate(y, "ekf.filter");
  validate(cfg);
  const std::size_t n = y.size();
  const std::size_t n_modes = cfg.n_modes;
  const Eigen::Index dim = state_size(n_modes);
  const RowVector h = observation_row(n_modes);
  const Matrix identity = Matrix::Identity(dim, dim);

  ModeTrace trace;
  trace.sample_rate_hz = cfg.fs;
  trace.innovation.resize(n);
  trace.modes.resize(n_modes);
  for (auto& m : trace.modes) {
    m.freq_rad_s.resize(n);
    m.damping_per_s.resize(n);
    m.recon.resize(n);
    m.amplitude_proxy.resize(n);
  }

  auto symmetrize = [&](Matrix& p) {
    trace.max_asymmetry = std::max(trace.max_asymmetry, (p - p.transpose()).cwiseAbs().maxCoeff());
    p = 0.5 * (p + p.transpose());
  };

  Vector x = cfg.x0;
  Matrix p = cfg.p0;
  for (std::size_t k = 0; k < n; ++k) {
    // Measurement update.
    const double innovation = y.samples[k] - h.dot(x);
    const Vector ph = p * h.transpose();
    const double s = cfg.r + h.dot(ph);
    const Vector gain = ph / s;
    x += gain * innovation;
    if (cfg.robust_cov) {
      const Matrix a = identity - gain * h;
      p = a * p * a.transpose() + cfg.r * gain * gain.transpose();
    } else {
      p -= gain * (h * p);
    }
    symmetrize(p);
    if (!x.allFinite() || !p.allFinite()) {
      throw DivergenceError(k, "non-finite state after update at sample " + std::to_string(k));
    }

    trace.innovation[k] = innovation;
    for (std::size_t l = 0; l < n_modes; ++l) {
      const Eigen::Index b = static_cast<Eigen::Index>(l) * kBlock;
      auto& m = trace.modes[l];
      m.freq_rad_s[k] = x[b + kFreq];
      m.damping_per_s[k] = x[b + kDamp];
      m.recon[k] = x[b + kCos] + x[b + kSin];
      m.amplitude_proxy[k] = std::hypot(x[b + kCos], x[b + kSin]);
    }

    if (k + 1 == n) {
      break;
    }
    // Prediction.
    const Matrix f = jacobian(x, cfg.fs);
    x = transition(x, cfg.fs);
    p = f * p * f.transpose() + cfg.q;
    symmetrize(p);
    if (!x.allFinite() || !p.allFinite()) {
      throw DivergenceError(k, "non-finite state after prediction at sample " + std::to_string(k));
    }
  }
  trace.final_state = EkfState{x, p};
  return trace;
}

Initialization initialize_from_fft(const TimeSeries& y, std::size_t l_max,
                                   const InitConfig& config) {
  hhtekf::validate(y, "ekf.init");
  if (y.size() < 16) {
    throw InvalidArgument("ekf.init", "spectral initialization needs at least 16 samples");
  }
  if (l_max < 1) {
    throw InvalidArgument("ekf.init", "l_max must be at least 1");
  }
  spectrum::PeakConfig peak_cfg;
  peak_cfg.max_peaks = l_max;
  peak_cfg.min_separation_hz = config.min_separation_hz;
  peak_cfg.threshold_ratio = config.threshold_ratio;
  peak_cfg.min_freq_hz = config.min_freq_hz;
  auto peaks = spectrum::find_peaks(y.samples, y.sample_rate_hz, peak_cfg);
  if (peaks.empty()) {
    throw NoOscillationError("no oscillation detected");
  }
  std::sort(peaks.begin(), peaks.end(),
            [](const auto& a, const auto& b) { return a.freq_rad_s < b.freq_rad_s; });

  Initialization init;
  init.n_modes = peaks.size();
  init.x0 = Vector::Zero(state_size(init.n_modes));
  for (std::size_t l = 0; l < peaks.size(); ++l) {
    const Eigen::Index b = static_cast<Eigen::Index>(l) * kBlock;
    const double radius = peaks[l].amplitude / std::numbers::sqrt2;
    const double angle = peaks[l].phase_rad + std::numbers::pi / 4.0;
    init.x0[b + kCos] = radius * std::cos(angle);
    init.x0[b + kSin] = radius * std::sin(angle);
    init.x0[b + kFreq] = peaks[l].freq_rad_s;
    init.x0[b + kDamp] = 0.0;
  }
  init.p0 = initial_covariance(init.n_modes, config.prior);
  init.peaks = std::move(peaks);
  return init;
}

}  // namespace hhtekf::ekf
