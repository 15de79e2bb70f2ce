#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hhtekf/ekf.hpp"
#include "hhtekf/hilbert.hpp"
#include "hhtekf/signalgen.hpp"

namespace hhtekf::eval {

enum class Method { hht, masking, ekf };

std::string_view to_string(Method m);
std::optional<Method> parse_method(std::string_view name);

enum class Window { full, middle_third };

// Greedy nearest-frequency pairing. The globally closest (truth, estimate)
// pair is fixed first, then the next closest among the unclaimed, and so on;
// ties go to the lower truth index, then the lower estimate index. Returns, per
// true mode, the index of its estimate or nullopt when none is left.
std::vector<std::optional<std::size_t>> assign_modes(std::span<const double> estimated_means,
                                                     std::span<const double> truth_means);

// True iff |est - truth| / truth > 0.5.
bool failure_flag(double estimated_mean, double truth_mean);

double mse(std::span<const double> est, std::span<const double> truth, Window window = Window::full);

// Mean squared difference over [begin, end).
double mse_range(std::span<const double> est, std::span<const double> truth, std::size_t begin,
                 std::size_t end);

struct ModeScore {
  std::optional<std::size_t> trace_index;
  double mean_estimate = 0.0;  // over the scored window
  double mean_truth = 0.0;
  bool failed = true;
  double mse = 0.0;  // scored window (burn-in skipped for ekf)
  double mse_full = 0.0;
  double mse_middle_third = 0.0;
};

struct RunScore {
  Method method = Method::ekf;
  std::uint64_t seed = 0;
  std::vector<ModeScore> modes;
  bool failed = true;  // any mode failed
  bool errored = false;
  std::string error;
};

enum class Experiment { case_a, case_b, custom };

std::string_view to_string(Experiment e);

struct ExperimentConfig {
  double noise_std = 0.1;
  hilbert::HhtConfig hht;
  ekf::PipelineConfig ekf;
  // EKF mode count taken from the scenario's ground truth rather than sought
  // from the spectrum.
  bool ekf_modes_from_truth = true;
  // When set, baselines offer only their n_true most energetic non-DC IMFs
  // instead of every non-DC IMF. Off by default.
  bool limit_candidates = false;
  double burn_in_fraction = 0.1;
  bool include_failed_in_mse = false;
  std::size_t workers = 1;
  // Used when the experiment is Experiment::custom.
  std::function<signalgen::Scenario(std::uint64_t seed)> generator;
};

struct ExperimentReport {
  Method method = Method::ekf;
  Experiment experiment = Experiment::case_a;
  std::size_t n_runs = 0;
  std::uint64_t base_seed = 0;
  std::vector<double> mse;  // per mode, mean over the aggregated runs
  std::vector<double> mse_full;
  std::vector<double> mse_middle_third;
  std::size_t n_failed = 0;
  std::size_t n_errored = 0;
  std::size_t n_aggregated = 0;  // runs contributing to the MSE means
  double failure_rate = 0.0;
  std::size_t scored_from = 0;  // first sample of the scored window
  std::vector<RunScore> runs;  // indexed by run number
};

// Scores one method's frequency traces against the truth. `traces` holds the
// candidate estimated frequency sequences.
RunScore score_run(Method method, std::uint64_t seed,
                   const std::vector<std::vector<double>>& traces,
                   const signalgen::GroundTruth& truth, std::size_t scored_from);

std::vector<ExperimentReport> monte_carlo(Experiment experiment, const std::vector<Method>& methods,
                                          std::size_t n_runs, std::uint64_t base_seed,
                                          const ExperimentConfig& config);

}  // namespace hhtekf::eval
