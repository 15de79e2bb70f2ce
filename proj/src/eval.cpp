#include "hhtekf/eval.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <numeric>
#include <thread>

namespace hhtekf::eval {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double mean_range(std::span<const double> v, std::size_t begin, std::size_t end) {
  if (end <= begin) {
    return kNaN;
  }
  return std::accumulate(v.begin() + static_cast<long>(begin), v.begin() + static_cast<long>(end), 0.0) /
         static_cast<double>(end - begin);
}

double energy(const std::vector<double>& v) {
  return std::inner_product(v.begin(), v.end(), v.begin(), 0.0);
}

std::vector<std::vector<double>> method_traces(Method method, const signalgen::Scenario& scenario,
                                               const ExperimentConfig& config) {
  std::vector<std::vector<double>> traces;
  switch (method) {
    case Method::hht:
    case Method::masking: {
      const auto result = method == Method::hht ? hilbert::hht(scenario.series, config.hht)
                                                : hilbert::masking_hht(scenario.series, config.hht);
      auto candidates = result.oscillatory();
      if (config.limit_candidates && candidates.size() > scenario.truth.n_modes()) {
        std::stable_sort(candidates.begin(), candidates.end(), [](const auto* a, const auto* b) {
          return energy(a->imf.samples) > energy(b->imf.samples);
        });
        candidates.resize(scenario.truth.n_modes());
        std::stable_sort(candidates.begin(), candidates.end(),
                         [](const auto* a, const auto* b) { return a->imf.index < b->imf.index; });
      }
      for (const auto* c : candidates) {
        traces.push_back(c->trace.freq_rad_s);
      }
      break;
    }
    case Method::ekf: {
      auto cfg = config.ekf;
      if (config.ekf_modes_from_truth) {
        cfg.n_modes = scenario.truth.n_modes();
      }
      const auto result = ekf::run_hht_ekf(scenario.series, cfg);
      for (const auto& m : result.trace.modes) {
        traces.push_back(m.freq_rad_s);
      }
      break;
    }
  }
  return traces;
}

signalgen::Scenario make_scenario(Experiment experiment, std::uint64_t seed,
                                  const ExperimentConfig& config) {
  switch (experiment) {
    case Experiment::case_a:
      return signalgen::case_a(config.noise_std, seed);
    case Experiment::case_b:
      return signalgen::case_b(config.noise_std, seed);
    case Experiment::custom:
      break;
  }
  if (!config.generator) {
    throw InvalidArgument("eval", "custom experiment needs a generator");
  }
  return config.generator(seed);
}

}  // namespace

std::string_view to_string(Method m) {
  switch (m) {
    case Method::hht:
      return "hht";
    case Method::masking:
      return "masking";
    case Method::ekf:
      return "ekf";
  }
  return "?";
}

std::optional<Method> parse_method(std::string_view name) {
  if (name == "hht") return Method::hht;
  if (name == "masking") return Method::masking;
  if (name == "ekf" || name == "hht-ekf") return Method::ekf;
  return std::nullopt;
}

std::string_view to_string(Experiment e) {
  switch (e) {
    case Experiment::case_a:
      return "case_a";
    case Experiment::case_b:
      return "case_b";
    case Experiment::custom:
      return "custom";
  }
  return "?";
}

std::vector<std::optional<std::size_t>> assign_modes(std::span<const double> estimated_means,
                                                     std::span<const double> truth_means) {
  std::vector<std::optional<std::size_t>> out(truth_means.size());
  std::vector<bool> claimed(estimated_means.size(), false);
  for (std::size_t round = 0; round < std::min(truth_means.size(), estimated_means.size()); ++round) {
    double best = std::numeric_limits<double>::infinity();
    std::optional<std::pair<std::size_t, std::size_t>> pick;
    for (std::size_t t = 0; t < truth_means.size(); ++t) {
      if (out[t]) continue;
      for (std::size_t e = 0; e < estimated_means.size(); ++e) {
        if (claimed[e]) continue;
        const double d = std::abs(estimated_means[e] - truth_means[t]);
        // Strict < keeps the lowest (truth, estimate) index among ties.
        if (d < best || !pick) {
          best = d;
          pick = std::pair{t, e};
        }
      }
    }
    if (!pick) break;
    out[pick->first] = pick->second;
    claimed[pick->second] = true;
  }
  return out;
}

bool failure_flag(double estimated_mean, double truth_mean) {
  return !(std::abs(estimated_mean - truth_mean) / truth_mean <= 0.5);
}

double mse_range(std::span<const double> est, std::span<const double> truth, std::size_t begin,
                 std::size_t end) {
  if (est.size() != truth.size()) {
    throw InvalidArgument("eval", "mse needs equal-length sequences");
  }
  end = std::min(end, est.size());
  if (end <= begin) {
    return kNaN;
  }
  double sum = 0.0;
  for (std::size_t k = begin; k < end; ++k) {
    const double d = est[k] - truth[k];
    sum += d * d;
  }
  return sum / static_cast<double>(end - begin);
}

double mse(std::span<const double> est, std::span<const double> truth, Window window) {
  const std::size_t n = est.size();
  if (window == Window::middle_third) {
    return mse_range(est, truth, n / 3, 2 * n / 3);
  }
  return mse_range(est, truth, 0, n);
}

RunScore score_run(Method method, std::uint64_t seed, const std::vector<std::vector<double>>& traces,
                   const signalgen::GroundTruth& truth, std::size_t scored_from) {
  RunScore score;
  score.method = method;
  score.seed = seed;
  const std::size_t n = truth.n_modes() > 0 ? truth.freq_rad_s.front().size() : 0;
  std::vector<double> truth_means, est_means;
  for (const auto& t : truth.freq_rad_s) {
    truth_means.push_back(mean_range(t, scored_from, n));
  }
  for (const auto& e : traces) {
    est_means.push_back(mean_range(e, scored_from, n));
  }
  const auto pairing = assign_modes(est_means, truth_means);
  score.failed = false;
  for (std::size_t l = 0; l < truth.n_modes(); ++l) {
    ModeScore m;
    m.mean_truth = truth_means[l];
    m.trace_index = pairing[l];
    if (pairing[l]) {
      const auto& est = traces[*pairing[l]];
      m.mean_estimate = est_means[*pairing[l]];
      m.failed = failure_flag(m.mean_estimate, m.mean_truth);
      m.mse = mse_range(est, truth.freq_rad_s[l], scored_from, n);
      m.mse_full = mse(est, truth.freq_rad_s[l], Window::full);
      m.mse_middle_third = mse(est, truth.freq_rad_s[l], Window::middle_third);
    } else {
      m.mean_estimate = kNaN;
      m.failed = true;
      m.mse = m.mse_full = m.mse_middle_third = kNaN;
    }
    score.failed = score.failed || m.failed;
    score.modes.push_back(m);
  }
  return score;
}

std::vector<ExperimentReport> monte_carlo(Experiment experiment, const std::vector<Method>& methods,
                                          std::size_t n_runs, std::uint64_t base_seed,
                                          const ExperimentConfig& config) {
  if (n_runs < 1) {
    throw InvalidArgument("eval", "n_runs must be at least 1");
  }
  std::vector<std::vector<RunScore>> runs(methods.size(), std::vector<RunScore>(n_runs));
  std::vector<std::size_t> scored_from(methods.size(), 0);
  std::atomic<std::size_t> next{0};

  auto worker = [&]() {
    for (std::size_t i = next++; i < n_runs; i = next++) {
      const std::uint64_t seed = base_seed + i;
      const auto scenario = make_scenario(experiment, seed, config);
      const std::size_t n = scenario.series.size();
      for (std::size_t m = 0; m < methods.size(); ++m) {
        const std::size_t from =
            methods[m] == Method::ekf
                ? static_cast<std::size_t>(std::floor(config.burn_in_fraction * static_cast<double>(n)))
                : 0;
        if (i == 0) {
          scored_from[m] = from;
        }
        try {
          runs[m][i] = score_run(methods[m], seed, method_traces(methods[m], scenario, config),
                                 scenario.truth, from);
        } catch (const std::exception& e) {
          RunScore failed = score_run(methods[m], seed, {}, scenario.truth, from);
          failed.errored = true;
          failed.error = e.what();
          runs[m][i] = std::move(failed);
        }
      }
    }
  };

  const std::size_t n_workers = std::clamp<std::size_t>(config.workers, 1, n_runs);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < n_workers; ++w) {
      pool.emplace_back(worker);
    }
    for (auto& t : pool) {
      t.join();
    }
  }

  std::vector<ExperimentReport> reports;
  for (std::size_t m = 0; m < methods.size(); ++m) {
    ExperimentReport r;
    r.method = methods[m];
    r.experiment = experiment;
    r.n_runs = n_runs;
    r.base_seed = base_seed;
    r.scored_from = scored_from[m];
    const std::size_t n_modes = runs[m].front().modes.size();
    r.mse.assign(n_modes, 0.0);
    r.mse_full.assign(n_modes, 0.0);
    r.mse_middle_third.assign(n_modes, 0.0);
    for (const auto& run : runs[m]) {
      r.n_failed += run.failed ? 1 : 0;
      r.n_errored += run.errored ? 1 : 0;
      if (run.failed && (!config.include_failed_in_mse || run.errored)) {
        continue;
      }
      bool usable = true;
      for (const auto& mode : run.modes) {
        usable = usable && std::isfinite(mode.mse);
      }
      if (!usable) {
        continue;
      }
      ++r.n_aggregated;
      for (std::size_t l = 0; l < n_modes; ++l) {
        r.mse[l] += run.modes[l].mse;
        r.mse_full[l] += run.modes[l].mse_full;
        r.mse_middle_third[l] += run.modes[l].mse_middle_third;
      }
    }
    for (std::size_t l = 0; l < n_modes; ++l) {
      const double denom = static_cast<double>(r.n_aggregated);
      r.mse[l] = r.n_aggregated ? r.mse[l] / denom : kNaN;
      r.mse_full[l] = r.n_aggregated ? r.mse_full[l] / denom : kNaN;
      r.mse_middle_third[l] = r.n_aggregated ? r.mse_middle_third[l] / denom : kNaN;
    }
    r.failure_rate = static_cast<double>(r.n_failed) / static_cast<double>(n_runs);
    r.runs = std::move(runs[m]);
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace hhtekf::eval
