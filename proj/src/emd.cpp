#include "hhtekf/emd.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace hhtekf::emd {

namespace {

constexpr const char* kStage = "emd";

}  // namespace

std::vector<double> Decomposition::reconstruct() const {
  std::vector<double> out = residue;
  for (const auto& imf : imfs) {
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] += imf.samples[k];
    }
  }
  return out;
}

Extrema find_extrema(std::span<const double> x) {
  if (x.size() < 3) {
    throw InvalidArgument(kStage, "extrema search needs at least 3 samples");
  }
  Extrema out;
  const std::size_t n = x.size();
  std::size_t i = 1;
  while (i + 1 < n) {
    // Extend over a plateau [i, j].
    std::size_t j = i;
    while (j + 1 < n - 1 && x[j + 1] == x[i]) {
      ++j;
    }
    if (x[j + 1] == x[i]) {
      // plateau runs into the last sample; nothing after it to compare with
      break;
    }
    const std::size_t mid = i + (j - i) / 2;
    if (x[i - 1] < x[i] && x[j + 1] < x[j]) {
      out.maxima.push_back(mid);
    } else if (x[i - 1] > x[i] && x[j + 1] > x[j]) {
      out.minima.push_back(mid);
    }
    i = j + 1;
  }
  return out;
}

std::size_t count_zero_crossings(std::span<const double> x) {
  std::size_t crossings = 0;
  int prev_sign = 0;
  for (double v : x) {
    const int sign = (v > 0.0) - (v < 0.0);
    if (sign == 0) {
      continue;
    }
    if (prev_sign != 0 && sign != prev_sign) {
      ++crossings;
    }
    prev_sign = sign;
  }
  return crossings;
}

bool satisfies_imf_property(std::span<const double> x) {
  if (x.size() < 3) {
    return false;
  }
  const auto ext = find_extrema(x);
  const auto n_ext = static_cast<long>(ext.maxima.size() + ext.minima.size());
  const auto n_zc = static_cast<long>(count_zero_crossings(x));
  return std::abs(n_ext - n_zc) <= 1;
}

std::vector<double> natural_cubic_spline(std::span<const double> knot_x,
                                         std::span<const double> knot_y,
                                         std::span<const double> at) {
  const std::size_t n = knot_x.size();
  if (n < 2 || knot_y.size() != n) {
    throw InvalidArgument(kStage, "spline needs at least 2 knots");
  }
  for (std::size_t i = 1; i < n; ++i) {
    if (!(knot_x[i] > knot_x[i - 1])) {
      throw InvalidArgument(kStage, "spline knots must be strictly increasing");
    }
  }

  // Second derivatives with M[0] = M[n-1] = 0, tridiagonal system by Thomas.
  std::vector<double> m(n, 0.0);
  if (n > 2) {
    const std::size_t inner = n - 2;
    std::vector<double> diag(inner), upper(inner), rhs(inner);
    for (std::size_t r = 0; r < inner; ++r) {
      const std::size_t i = r + 1;
      const double h0 = knot_x[i] - knot_x[i - 1];
      const double h1 = knot_x[i + 1] - knot_x[i];
      diag[r] = 2.0 * (h0 + h1);
      upper[r] = h1;
      rhs[r] = 6.0 * ((knot_y[i + 1] - knot_y[i]) / h1 - (knot_y[i] - knot_y[i - 1]) / h0);
    }
    for (std::size_t r = 1; r < inner; ++r) {
      const double lower = knot_x[r + 1] - knot_x[r];  // h0 of row r
      const double w = lower / diag[r - 1];
      diag[r] -= w * upper[r - 1];
      rhs[r] -= w * rhs[r - 1];
    }
    m[inner] = rhs[inner - 1] / diag[inner - 1];
    for (std::size_t r = inner - 1; r-- > 0;) {
      m[r + 1] = (rhs[r] - upper[r] * m[r + 2]) / diag[r];
    }
  }

  std::vector<double> out(at.size());
  for (std::size_t p = 0; p < at.size(); ++p) {
    const double t = at[p];
    if (t <= knot_x.front()) {
      const double h = knot_x[1] - knot_x[0];
      const double slope = (knot_y[1] - knot_y[0]) / h - h * (2.0 * m[0] + m[1]) / 6.0;
      out[p] = knot_y[0] + slope * (t - knot_x[0]);
      continue;
    }
    if (t >= knot_x.back()) {
      const double h = knot_x[n - 1] - knot_x[n - 2];
      const double slope = (knot_y[n - 1] - knot_y[n - 2]) / h + h * (m[n - 2] + 2.0 * m[n - 1]) / 6.0;
      out[p] = knot_y[n - 1] + slope * (t - knot_x[n - 1]);
      continue;
    }
    const auto it = std::upper_bound(knot_x.begin(), knot_x.end(), t);
    const std::size_t i = static_cast<std::size_t>(it - knot_x.begin()) - 1;
    const double h = knot_x[i + 1] - knot_x[i];
    const double a = (knot_x[i + 1] - t) / h;
    const double b = (t - knot_x[i]) / h;
    out[p] = a * knot_y[i] + b * knot_y[i + 1] +
             ((a * a * a - a) * m[i] + (b * b * b - b) * m[i + 1]) * h * h / 6.0;
  }
  return out;
}

std::vector<double> envelope(std::span<const double> x,
                             std::span<const std::size_t> indices) {
  if (indices.size() < 2) {
    throw InvalidArgument(kStage, "envelope needs at least 2 knots");
  }
  std::vector<double> kx, ky, at(x.size());
  kx.reserve(indices.size());
  ky.reserve(indices.size());
  for (auto i : indices) {
    if (i >= x.size()) {
      throw InvalidArgument(kStage, "envelope knot index out of range");
    }
    kx.push_back(static_cast<double>(i));
    ky.push_back(x[i]);
  }
  for (std::size_t k = 0; k < at.size(); ++k) {
    at[k] = static_cast<double>(k);
  }
  return natural_cubic_spline(kx, ky, at);
}

std::vector<double> mirror_extend(std::span<const double> x, std::size_t n_ext) {
  if (x.empty() || n_ext > x.size() - 1) {
    throw InvalidArgument(kStage, "mirror extension longer than the record allows");
  }
  const std::size_t n = x.size();
  std::vector<double> out;
  out.reserve(n + 2 * n_ext);
  for (std::size_t i = n_ext; i >= 1; --i) {
    out.push_back(x[i]);
  }
  out.insert(out.end(), x.begin(), x.end());
  for (std::size_t i = 1; i <= n_ext; ++i) {
    out.push_back(x[n - 1 - i]);
  }
  return out;
}

std::size_t default_mirror_length(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t quarter = n / 4;
  if (n < 3) {
    return 0;
  }
  const auto ext = find_extrema(x);
  std::size_t longest = 0;
  for (const auto* idx : {&ext.maxima, &ext.minima}) {
    for (std::size_t i = 1; i < idx->size(); ++i) {
      longest = std::max(longest, (*idx)[i] - (*idx)[i - 1]);
    }
  }
  if (longest == 0) {
    return std::min(quarter, n - 1);
  }
  return std::min({quarter, 2 * longest, n - 1});
}

namespace {

// Mean of the upper and lower envelopes, built on the mirrored signal and
// cropped to the core. Empty when either envelope has fewer than 2 knots.
std::vector<double> envelope_mean(std::span<const double> h, std::size_t n_ext) {
  const auto ext = mirror_extend(h, n_ext);
  auto extrema = find_extrema(ext);
  // Even reflection turns each endpoint into an extremum of the extended
  // signal whatever its slope; those are artifacts, not knots.
  if (n_ext > 0) {
    const std::size_t first = n_ext, last = n_ext + h.size() - 1;
    for (auto* idx : {&extrema.maxima, &extrema.minima}) {
      std::erase_if(*idx, [&](std::size_t i) { return i == first || i == last; });
    }
  }
  if (extrema.maxima.size() < 2 || extrema.minima.size() < 2) {
    return {};
  }
  std::vector<double> at(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    at[k] = static_cast<double>(k + n_ext);
  }
  auto spline_at = [&](const std::vector<std::size_t>& idx) {
    std::vector<double> kx, ky;
    kx.reserve(idx.size());
    ky.reserve(idx.size());
    for (auto i : idx) {
      kx.push_back(static_cast<double>(i));
      ky.push_back(ext[i]);
    }
    return natural_cubic_spline(kx, ky, at);
  };
  const auto upper = spline_at(extrema.maxima);
  const auto lower = spline_at(extrema.minima);
  std::vector<double> mean(h.size());
  for (std::size_t k = 0; k < h.size(); ++k) {
    mean[k] = (upper[k] + lower[k]) / 2.0;
  }
  return mean;
}

}  // namespace

SiftResult sift(std::span<const double> x, const EmdConfig& config) {
  if (x.size() < 3) {
    throw ResidueReached("too few samples to sift");
  }
  const auto core = find_extrema(x);
  if (core.maxima.size() + core.minima.size() < config.min_residue_extrema) {
    throw ResidueReached("too few interior extrema");
  }
  const std::size_t n_ext =
      std::min(config.mirror_length.value_or(default_mirror_length(x)), x.size() - 1);

  SiftResult result;
  result.imf.assign(x.begin(), x.end());
  auto& h = result.imf;
  for (int iter = 0; iter < config.max_sift_iters; ++iter) {
    const auto mean = envelope_mean(h, n_ext);
    if (mean.empty()) {
      break;
    }
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < h.size(); ++k) {
      num += mean[k] * mean[k];
      den += h[k] * h[k];
      h[k] -= mean[k];
    }
    result.iterations = iter + 1;
    const double sd = den > 0.0 ? num / den : 0.0;
    if (sd < config.sd_threshold && satisfies_imf_property(h)) {
      result.converged = true;
      break;
    }
  }
  return result;
}

Decomposition emd(const TimeSeries& x, const EmdConfig& config) {
  validate(x, kStage);
  if (x.size() < 8) {
    throw InvalidArgument(kStage, "EMD needs at least 8 samples");
  }
  Decomposition out;
  out.sample_rate_hz = x.sample_rate_hz;
  out.residue = x.samples;
  auto energy = [](const std::vector<double>& v) {
    double e = 0.0;
    for (double s : v) e += s * s;
    return e;
  };
  const double floor = energy(x.samples) * config.negligible_residue * config.negligible_residue;
  while (out.imfs.size() < config.max_imfs) {
    if (!out.imfs.empty() && energy(out.residue) <= floor) {
      break;
    }
    SiftResult s;
    try {
      s = sift(out.residue, config);
    } catch (const ResidueReached&) {
      break;
    }
    for (std::size_t k = 0; k < out.residue.size(); ++k) {
      out.residue[k] -= s.imf[k];
    }
    out.imfs.push_back(Imf{std::move(s.imf), static_cast<int>(out.imfs.size()) + 1,
                           s.converged, s.iterations});
  }
  return out;
}

std::vector<double> masking_emd(const TimeSeries& x, double mask_freq_rad_s,
                                double mask_amp, const EmdConfig& config) {
  validate(x, kStage);
  if (!(mask_amp >= 0.0) || !std::isfinite(mask_amp)) {
    throw InvalidArgument(kStage, "mask amplitude must be finite and non-negative");
  }
  if (mask_amp > 0.0 &&
      (!(mask_freq_rad_s > 0.0) || mask_freq_rad_s >= std::numbers::pi * x.sample_rate_hz)) {
    throw InvalidArgument(kStage, "mask frequency must lie in (0, Nyquist)");
  }
  if (mask_amp == 0.0) {
    return sift(x.samples, config).imf;
  }
  const std::size_t n = x.size();
  std::vector<double> plus(n), minus(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double m =
        mask_amp * std::sin(mask_freq_rad_s * static_cast<double>(k) / x.sample_rate_hz);
    plus[k] = x.samples[k] + m;
    minus[k] = x.samples[k] - m;
  }
  const auto a = sift(plus, config).imf;
  const auto b = sift(minus, config).imf;
  std::vector<double> out(n);
  for (std::size_t k = 0; k < n; ++k) {
    out[k] = (a[k] + b[k]) / 2.0;
  }
  return out;
}

}  // namespace hhtekf::emd
