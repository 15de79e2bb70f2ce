#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "hhtekf/signalgen.hpp"

using namespace hhtekf;
using namespace hhtekf::signalgen;
using std::numbers::pi;

TEST_SUITE("signalgen") {

TEST_CASE("case_a first sample is cos(0) + cos(pi/3)") {
  const auto sc = case_a(0.0, 3);
  CHECK(std::abs(sc.series.samples[0] - 1.5) <= 1e-12);
}

TEST_CASE("case_a sample 76 matches a scalar evaluation") {
  const auto sc = case_a(0.0, 3);
  const double k = 76.0, fs = 30.0;
  const double expected = std::exp(0.1 * k / fs) * std::cos(2 * pi * k / fs) +
                          std::exp(-0.01 * k / fs) * std::cos(3 * pi * k / fs + pi / 3) + 5.0;
  CHECK(std::abs(sc.series.samples[76] - expected) <= 1e-12);
  // k = 75 is not past the onset
  const double at75 = std::exp(0.1 * 75 / fs) * std::cos(2 * pi * 75 / fs) +
                      std::exp(-0.01 * 75 / fs) * std::cos(3 * pi * 75 / fs + pi / 3);
  CHECK(std::abs(sc.series.samples[75] - at75) <= 1e-12);
}

TEST_CASE("case_a layout") {
  const auto sc = case_a(0.0, 1);
  CHECK(sc.series.size() == 150);
  CHECK(sc.series.sample_rate_hz == 30.0);
  REQUIRE(sc.truth.n_modes() == 2);
  CHECK(sc.truth.freq_rad_s[0][10] == doctest::Approx(2 * pi));
  CHECK(sc.truth.freq_rad_s[1][10] == doctest::Approx(3 * pi));
  CHECK(sc.truth.damping_per_s[0][0] == -0.1);
  CHECK(sc.truth.damping_per_s[1][0] == 0.01);
  REQUIRE(sc.truth.step.has_value());
  CHECK(sc.truth.step->onset_index == 75);
  CHECK(sc.truth.step->value == 5.0);
}

TEST_CASE("case_b ground truth ramps from 3 pi") {
  const auto sc = case_b(0.0, 9);
  REQUIRE(sc.truth.n_modes() == 1);
  const auto& w = sc.truth.freq_rad_s[0];
  CHECK(w.front() == doctest::Approx(3 * pi).epsilon(1e-14));
  CHECK(w.back() == doctest::Approx(2 * pi * (1.5 + 0.5 * 149.0 / 150.0)).epsilon(1e-14));
  for (double s : sc.truth.damping_per_s[0]) {
    CHECK(s == 0.0);
  }
}

TEST_CASE("case_b uses the literal phase w[k] k / fs") {
  const auto sc = case_b(0.0, 1);
  for (int k : {0, 10, 75, 76, 149}) {
    const double w = 2 * pi * (1.5 + 0.5 * k / 150.0);
    const double expected = std::cos(w * k / 30.0) + (k > 75 ? 5.0 : 0.0);
    CHECK(std::abs(sc.series.samples[k] - expected) <= 1e-12);
  }
}

TEST_CASE("noisy minus clean is the noise stream") {
  for (std::uint64_t seed : {1u, 2u, 77u}) {
    const auto noisy = case_a(0.1, seed);
    const auto clean = case_a(0.0, seed);
    const auto noise = gaussian_noise(150, 0.1, seed);
    for (std::size_t k = 0; k < 150; ++k) {
      CHECK(std::abs((noisy.series.samples[k] - clean.series.samples[k]) - noise[k]) <= 1e-12);
    }
  }
}

TEST_CASE("generators are deterministic") {
  CHECK(case_a(0.1, 5).series.samples == case_a(0.1, 5).series.samples);
  CHECK(case_b(0.1, 5).series.samples == case_b(0.1, 5).series.samples);
  CHECK(case_a(0.1, 5).series.samples != case_a(0.1, 6).series.samples);
}

TEST_CASE("noise stream mean obeys the law of large numbers") {
  constexpr std::size_t n = 100000;
  for (std::uint64_t seed : {1u, 42u}) {
    const auto e = gaussian_noise(n, 0.1, seed);
    double mean = 0.0, var = 0.0;
    for (double v : e) mean += v;
    mean /= n;
    for (double v : e) var += (v - mean) * (v - mean);
    var /= n - 1;
    CHECK(std::abs(mean) <= 3 * 0.1 / std::sqrt(double(n)));
    CHECK(var == doctest::Approx(0.01).epsilon(0.02));
  }
}

TEST_CASE("gaussian stream is pinned") {
  // mt19937_64's output is fixed by the standard, so these are stable.
  std::mt19937_64 ref(1);
  GaussianStream g(1);
  const double u1 = (static_cast<double>(ref() >> 11) + 1.0) * 0x1.0p-53;
  const double u2 = (static_cast<double>(ref() >> 11) + 1.0) * 0x1.0p-53;
  const double r = std::sqrt(-2.0 * std::log(u1));
  CHECK(g.next() == r * std::cos(2 * pi * u2));
  CHECK(g.next() == r * std::sin(2 * pi * u2));
}

TEST_CASE("synthesize matches scalar evaluation") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int c = 0; c < 20; ++c) {
    const double fs = 10.0 + 90.0 * u(rng);
    std::vector<ModeSpec> modes;
    for (int m = 0; m < 3; ++m) {
      modes.push_back({.amplitude = 2 * u(rng), .damping_per_s = u(rng) - 0.5,
                       .freq_rad_s = (0.01 + 0.45 * u(rng)) * 2 * pi * fs, .phase_rad = 6 * u(rng),
                       .freq_ramp = std::nullopt});
    }
    const std::size_t n = 64;
    const auto sc = synthesize(modes, n, fs, StepJump{10, 1.5}, 0.0, 0);
    CHECK(sc.truth.freq_rad_s.size() == 3);
    for (std::size_t k = 0; k < n; ++k) {
      double y = k > 10 ? 1.5 : 0.0;
      for (const auto& m : modes) {
        y += m.amplitude * std::exp(-m.damping_per_s * k / fs) * std::cos(m.freq_rad_s * k / fs + m.phase_rad);
      }
      CHECK(std::abs(sc.series.samples[k] - y) <= 1e-12);
      CHECK(sc.truth.freq_rad_s[0][k] == modes[0].freq_rad_s);
    }
  }
}

TEST_CASE("ramped mode truth") {
  const ModeSpec m{.amplitude = 1, .damping_per_s = 0, .freq_rad_s = 1.0, .phase_rad = 0,
                   .freq_ramp = FreqRamp{2.0, 4.0}};
  const auto sc = synthesize({m}, 10, 30.0, std::nullopt, 0.0, 0);
  CHECK(sc.truth.freq_rad_s[0][0] == 2.0);
  CHECK(sc.truth.freq_rad_s[0][5] == doctest::Approx(3.0));
  CHECK(sc.truth.freq_rad_s[0].size() == 10);
}

TEST_CASE("synthesize rejects bad input") {
  const ModeSpec ok{.amplitude = 1, .damping_per_s = 0, .freq_rad_s = 1.0, .phase_rad = 0, .freq_ramp = std::nullopt};
  CHECK_THROWS_AS(synthesize({ok}, 1, 30.0, std::nullopt, 0.0, 0), InvalidArgument);
  CHECK_THROWS_AS(synthesize({ok}, 10, 0.0, std::nullopt, 0.0, 0), InvalidArgument);
  CHECK_THROWS_AS(synthesize({ok}, 10, 30.0, std::nullopt, -1.0, 0), InvalidArgument);
  CHECK_THROWS_AS(synthesize({ok}, 10, 30.0, std::nullopt, NAN, 0), InvalidArgument);
  auto at_nyquist = ok;
  at_nyquist.freq_rad_s = pi * 30.0;
  CHECK_THROWS_AS(synthesize({at_nyquist}, 10, 30.0, std::nullopt, 0.0, 0), InvalidArgument);
  auto ramp_over = ok;
  ramp_over.freq_ramp = FreqRamp{1.0, 200.0};
  CHECK_THROWS_AS(synthesize({ramp_over}, 10, 30.0, std::nullopt, 0.0, 0), InvalidArgument);
  auto inf_amp = ok;
  inf_amp.amplitude = INFINITY;
  CHECK_THROWS_AS(synthesize({inf_amp}, 10, 30.0, std::nullopt, 0.0, 0), InvalidArgument);
}

}  // TEST_SUITE
