#include "support.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "hhtekf/emd.hpp"
#include "hhtekf/eval.hpp"
#include "hhtekf/hilbert.hpp"

namespace support {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

bool same_bits(double a, double b) {
  return (std::isnan(a) && std::isnan(b)) || a == b;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!same_bits(a[i], b[i])) return false;
  }
  return true;
}

}  // namespace

Surrogate make_surrogate(std::uint64_t seed) {
  using hhtekf::signalgen::ModeSpec;
  constexpr double fs = 30.0;
  constexpr std::size_t n = 600;
  const std::vector<ModeSpec> modes{
      {.amplitude = 1.0, .damping_per_s = 0.02, .freq_rad_s = 2 * kPi * 0.5, .phase_rad = 0.3, .freq_ramp = std::nullopt},
      {.amplitude = 1.0, .damping_per_s = 0.05, .freq_rad_s = 2 * kPi * 1.5, .phase_rad = 1.1, .freq_ramp = std::nullopt}};
  const auto clean = hhtekf::signalgen::synthesize(modes, n, fs, std::nullopt, 0.0, seed);

  Surrogate s;
  s.oscillation = clean.series.samples;
  double power = 0.0;
  for (double v : s.oscillation) power += v * v;
  power /= static_cast<double>(n);
  s.noise_var = power / 100.0;
  const auto noise = hhtekf::signalgen::gaussian_noise(n, std::sqrt(s.noise_var), seed);
  s.series = clean.series;
  for (std::size_t k = 0; k < n; ++k) {
    const double trend = 10.0 - 2.0 * static_cast<double>(k) / static_cast<double>(n);
    s.series.samples[k] = s.oscillation[k] + trend + noise[k];
  }
  return s;
}

Check surrogate_final_frequencies(std::uint64_t seed) {
  const auto s = make_surrogate(seed);
  hhtekf::ekf::PipelineConfig cfg;
  cfg.r = s.noise_var;
  Check out;
  try {
    const auto r = hhtekf::ekf::run_hht_ekf(s.series, cfg);
    out.passed = true;
    std::string finals;
    for (const auto& m : r.trace.modes) {
      finals += fmt(" %.3f", m.freq_rad_s.back() / (2 * kPi));
    }
    for (double f : {0.5, 1.5}) {
      const bool hit = std::any_of(r.trace.modes.begin(), r.trace.modes.end(), [&](const auto& m) {
        return std::abs(m.freq_rad_s.back() / (2 * kPi) - f) <= 0.05;
      });
      out.passed = out.passed && hit;
    }
    out.detail = "final Hz:" + finals;
  } catch (const std::exception& e) {
    out.detail = std::string("error: ") + e.what();
  }
  return out;
}

Check case_b_convergence() {
  const auto sc = hhtekf::signalgen::case_b(0.0, 1);
  hhtekf::ekf::PipelineConfig cfg;
  cfg.n_modes = 1;
  Check out;
  try {
    const auto r = hhtekf::ekf::run_hht_ekf(sc.series, cfg);
    const auto& est = r.trace.modes.at(0).freq_rad_s;
    const auto& truth = sc.truth.freq_rad_s[0];
    double worst = 0.0;
    std::size_t worst_k = 0;
    for (std::size_t k = 50; k < est.size(); ++k) {
      const double rel = std::abs(est[k] - truth[k]) / truth[k];
      if (rel > worst) {
        worst = rel;
        worst_k = k;
      }
    }
    out.passed = worst <= 0.05;
    out.detail = fmt("worst relative error from k=50: %.4f at k=%.0f (limit 0.05)", worst,
                     static_cast<double>(worst_k));
  } catch (const std::exception& e) {
    out.detail = std::string("error: ") + e.what();
  }
  return out;
}

Check emd_reconstruction(int cases, double tol) {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::uniform_int_distribution<std::size_t> len(8, 600);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    const std::size_t n = len(rng);
    std::vector<double> x(n);
    const double f1 = 0.5 + 5.0 * (u(rng) + 1.0);
    const double f2 = 0.1 + 0.5 * (u(rng) + 1.0);
    const double slope = u(rng);
    for (std::size_t k = 0; k < n; ++k) {
      const double t = static_cast<double>(k) / 30.0;
      x[k] = std::sin(2 * kPi * f1 * t) + 2.0 * std::cos(2 * kPi * f2 * t + 1.0) + slope * t +
             0.3 * u(rng);
    }
    const auto d = hhtekf::emd::emd({x, 30.0});
    const auto back = d.reconstruct();
    for (std::size_t k = 0; k < n; ++k) {
      worst = std::max(worst, std::abs(back[k] - x[k]));
    }
  }
  return {worst <= tol, fmt("%.0f signals, worst |error| %.3g (limit %.0e)", cases, worst, tol)};
}

Check jacobian_vs_finite_difference(int cases, double rel_tol) {
  using hhtekf::ekf::Vector;
  constexpr double fs = 30.0;
  constexpr double floor = 1e-9;  // absolute floor for entries that are ~0
  std::mt19937_64 rng(777);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    const int modes = 1 + c % 3;
    Vector x(4 * modes);
    for (int m = 0; m < modes; ++m) {
      x(4 * m + 0) = 2.0 * u(rng);
      x(4 * m + 1) = 2.0 * u(rng);
      x(4 * m + 2) = 0.5 + 40.0 * (u(rng) + 1.0);
      x(4 * m + 3) = 0.5 * u(rng);
    }
    const auto J = hhtekf::ekf::jacobian(x, fs);
    for (Eigen::Index j = 0; j < x.size(); ++j) {
      const double h = 1e-6 * std::max(1.0, std::abs(x(j)));
      Vector xp = x, xm = x;
      xp(j) += h;
      xm(j) -= h;
      const Vector col = (hhtekf::ekf::transition(xp, fs) - hhtekf::ekf::transition(xm, fs)) / (2 * h);
      for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double a = J(i, j), b = col(i);
        const double scale = std::max({std::abs(a), std::abs(b), floor / rel_tol});
        worst = std::max(worst, std::abs(a - b) / scale);
      }
    }
  }
  return {worst <= rel_tol, fmt("%.0f states, worst relative error %.3g (limit %.0e)", cases, worst, rel_tol)};
}

Check transition_closed_form(int steps, double tol) {
  using hhtekf::ekf::Vector;
  constexpr double fs = 30.0;
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < 20; ++c) {
    const double bc = u(rng), bs = u(rng);
    const double w = 0.5 + 30.0 * (u(rng) + 1.0);
    const double sigma = 0.1 * u(rng) + 0.05;
    Vector x(4);
    x << bc, bs, w, sigma;
    for (int k = 1; k <= steps; ++k) {
      x = hhtekf::ekf::transition(x, fs);
      const double d = std::exp(-sigma * k / fs);
      const double th = w * k / fs;
      const double xc = d * (bc * std::cos(th) - bs * std::sin(th));
      const double xs = d * (bc * std::sin(th) + bs * std::cos(th));
      worst = std::max({worst, std::abs(x(0) - xc), std::abs(x(1) - xs)});
    }
  }
  return {worst <= tol, fmt("%.0f steps x 20 states, worst |error| %.3g (limit %.0e)", steps, worst, tol)};
}

Check pure_tone_frequency(int cases, double rel_tol) {
  constexpr double fs = 30.0;
  constexpr std::size_t n = 600;
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  double worst = 0.0;
  for (int c = 0; c < cases; ++c) {
    const double w0 = (0.05 + 0.35 * u(rng)) * 2 * kPi * fs;
    const double phi = 2 * kPi * u(rng);
    std::vector<double> x(n);
    for (std::size_t k = 0; k < n; ++k) {
      x[k] = std::cos(w0 * static_cast<double>(k) / fs + phi);
    }
    const auto z = hhtekf::hilbert::analytic_signal(x);
    const auto tr = hhtekf::hilbert::instantaneous(z, fs);
    for (std::size_t k = tr.valid_range.first; k <= tr.valid_range.second; ++k) {
      worst = std::max(worst, std::abs(tr.freq_rad_s[k] - w0) / w0);
    }
  }
  return {worst <= rel_tol, fmt("%.0f tones, worst interior relative error %.3g (limit %.2f)", cases, worst, rel_tol)};
}

Check mirror_core_preserved(int cases) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-10.0, 10.0);
  std::uniform_int_distribution<std::size_t> len(2, 300);
  int bad = 0;
  for (int c = 0; c < cases; ++c) {
    const std::size_t n = len(rng);
    std::vector<double> x(n);
    for (auto& v : x) v = u(rng);
    const std::size_t n_ext = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    const auto ext = hhtekf::emd::mirror_extend(x, n_ext);
    bool ok = ext.size() == n + 2 * n_ext;
    for (std::size_t k = 0; ok && k < n; ++k) {
      ok = same_bits(ext[n_ext + k], x[k]);
    }
    for (std::size_t j = 1; ok && j <= n_ext; ++j) {
      ok = ext[n_ext - j] == x[j] && ext[n_ext + n - 1 + j] == x[n - 1 - j];
    }
    bad += !ok;
  }
  return {bad == 0, fmt("%.0f cases, %.0f violations", cases, bad)};
}

Check monte_carlo_worker_invariance(std::size_t runs, std::size_t workers) {
  using namespace hhtekf::eval;
  const std::vector<Method> methods{Method::hht, Method::masking, Method::ekf};
  ExperimentConfig one;
  one.workers = 1;
  ExperimentConfig many = one;
  many.workers = workers;
  int mismatches = 0;
  for (auto experiment : {Experiment::case_a, Experiment::case_b}) {
    const auto a = monte_carlo(experiment, methods, runs, 42, one);
    const auto b = monte_carlo(experiment, methods, runs, 42, many);
    for (std::size_t m = 0; m < a.size(); ++m) {
      mismatches += !same_bits(a[m].mse, b[m].mse) || !same_bits(a[m].mse_full, b[m].mse_full) ||
                    !same_bits(a[m].mse_middle_third, b[m].mse_middle_third) ||
                    a[m].failure_rate != b[m].failure_rate || a[m].n_errored != b[m].n_errored;
      for (std::size_t r = 0; r < runs; ++r) {
        const auto& x = a[m].runs[r];
        const auto& y = b[m].runs[r];
        mismatches += x.seed != y.seed || x.failed != y.failed || x.modes.size() != y.modes.size();
        for (std::size_t l = 0; l < std::min(x.modes.size(), y.modes.size()); ++l) {
          mismatches += !same_bits(x.modes[l].mse, y.modes[l].mse) ||
                        !same_bits(x.modes[l].mean_estimate, y.modes[l].mean_estimate);
        }
      }
    }
  }
  return {mismatches == 0, fmt("%.0f runs per case, 1 vs %.0f workers, %.0f mismatches",
                               static_cast<double>(runs), static_cast<double>(workers), mismatches)};
}

}  // namespace support
