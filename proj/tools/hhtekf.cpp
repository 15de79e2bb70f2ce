#include <iostream>
#include <thread>

#include <CLI11.hpp>

#include "hhtekf/cli.hpp"

namespace cli = hhtekf::cli;

namespace {

void add_overrides(CLI::App* app, cli::Overrides& o) {
  app->add_option("--n-modes", o.n_modes, "Number of modes the EKF tracks");
  app->add_option("--q-scale", o.q_scale, "Process covariance Q = q_scale * I (default 1e-9)");
  app->add_option("--r", o.r, "Measurement variance R (default 1e-3)");
  app->add_option("--dc-cutoff-hz", o.dc_cutoff_hz, "IMFs below this mean frequency are trend (default 0.1)");
  app->add_option("--sd-threshold", o.sd_threshold, "Sifting stop threshold (default 0.2)");
  app->add_option("--mask-freq-ratio", o.mask_freq_ratio, "Mask frequency / dominant frequency (default 1.6)");
  app->add_option("--mask-amp-ratio", o.mask_amp_ratio, "Mask amplitude / dominant RMS amplitude (default 1.6)");
  app->add_option("--burn-in", o.burn_in, "Fraction of samples skipped when scoring the EKF (default 0.1)");
  app->add_option("--robust-cov", o.robust_cov, "Joseph-form covariance update (default true)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"EKF-enhanced Hilbert-Huang oscillation analysis"};
  app.require_subcommand(1);
  const auto default_dir = cli::default_out_dir();

  cli::GenerateRequest gen;
  gen.out_dir = default_dir;
  auto* g = app.add_subcommand("generate", "Write a built-in scenario as signal.csv and truth.csv");
  g->add_option("--scenario", gen.scenario, "case_a or case_b")->capture_default_str();
  g->add_option("--seed", gen.seed, "Noise seed")->capture_default_str();
  g->add_option("--noise-std", gen.noise_std, "Noise standard deviation")->capture_default_str();
  g->add_option("--out-dir", gen.out_dir, "Output directory");

  cli::AnalysisRequest an;
  an.out_dir = default_dir;
  std::string scenario;
  std::string input;
  double fs = 0.0;
  auto* a = app.add_subcommand("analyze", "Analyze one signal");
  auto* scen_opt = a->add_option("--scenario", scenario, "Built-in scenario: case_a or case_b");
  auto* input_opt = a->add_option("--input", input, "CSV file: time,value or a single value column");
  scen_opt->excludes(input_opt);
  auto* fs_opt = a->add_option("--fs", fs, "Sample rate in Hz for single-column CSV");
  a->add_option("--method", an.method, "hht, masking, ekf or hht-ekf")->capture_default_str();
  a->add_option("--seed", an.seed, "Noise seed for built-in scenarios")->capture_default_str();
  a->add_option("--noise-std", an.noise_std, "Noise standard deviation for built-in scenarios")
      ->capture_default_str();
  a->add_option("--out-dir", an.out_dir, "Output directory");
  add_overrides(a, an.overrides);

  cli::ReproduceRequest rep;
  rep.out_dir = default_dir;
  rep.workers = std::max(1u, std::thread::hardware_concurrency());
  std::string table;
  auto* r = app.add_subcommand("reproduce", "Monte Carlo reproduction of a results table");
  r->add_option("table", table, "t1 (closely spaced modes) or t2 (ramped frequency)")
      ->required()
      ->check(CLI::IsMember({"t1", "t2"}));
  r->add_option("--runs", rep.runs, "Monte Carlo runs")->capture_default_str();
  r->add_option("--seed", rep.seed, "Base seed; run i uses seed + i")->capture_default_str();
  r->add_option("--noise-std", rep.noise_std, "Noise standard deviation")->capture_default_str();
  r->add_option("--workers", rep.workers, "Worker threads (results do not depend on it)");
  r->add_option("--out-dir", rep.out_dir, "Output directory");
  add_overrides(r, rep.overrides);

  std::vector<std::string> traces;
  std::string plot_dir = default_dir.string();
  auto* p = app.add_subcommand("plotdata", "Turn trace.csv files into long-format panel CSVs");
  p->add_option("traces", traces, "trace.csv files written by analyze")->required();
  p->add_option("--out-dir", plot_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return cli::kExitUsage;
  }

  if (g->parsed()) {
    return cli::generate(gen, std::cerr);
  }
  if (a->parsed()) {
    if (!scenario.empty()) an.scenario = scenario;
    if (!input.empty()) an.input = input;
    if (fs_opt->count() > 0) an.fs = fs;
    return cli::analyze(an, std::cerr);
  }
  if (r->parsed()) {
    rep.table = table == "t1" ? 1 : 2;
    return cli::reproduce(rep, std::cout, std::cerr);
  }
  std::vector<std::filesystem::path> paths(traces.begin(), traces.end());
  return cli::plotdata(paths, plot_dir, std::cerr);
}
