#include <algorithm>
#include <utility>

#include "hhtekf/ekf.hpp"

namespace hhtekf::ekf {

PipelineResult run_hht_ekf(const TimeSeries& y, const PipelineConfig& config) {
  PipelineResult out;
  out.decomposition = hilbert::hht(y, config.hht);

  const std::size_t n = y.size();
  out.ekf_input.assign(n, 0.0);
  out.trend = out.decomposition.residue;
  for (const auto& c : out.decomposition.components) {
    auto& target = c.is_dc ? out.trend : out.ekf_input;
    for (std::size_t k = 0; k < n; ++k) {
      target[k] += c.imf.samples[k];
    }
  }

  const TimeSeries input{out.ekf_input, y.sample_rate_hz, y.start_index};
  // Spectral content below the DC cutoff already belongs to the trend.
  auto init_cfg = config.init;
  init_cfg.min_freq_hz = std::max(init_cfg.min_freq_hz,
                                  hilbert::effective_dc_cutoff_hz(config.hht, n, y.sample_rate_hz));
  out.init = initialize_from_fft(input, config.n_modes.value_or(config.max_modes), init_cfg);

  EkfConfig cfg;
  cfg.n_modes = out.init.n_modes;
  cfg.q = process_covariance(cfg.n_modes, config.q_phasor, config.q_freq_damping);
  cfg.r = config.r;
  cfg.x0 = out.init.x0;
  cfg.p0 = out.init.p0;
  cfg.fs = y.sample_rate_hz;
  cfg.robust_cov = config.robust_cov;
  out.trace = filter(input, cfg);
  return out;
}

}  // namespace hhtekf::ekf
