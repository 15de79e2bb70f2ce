#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <numbers>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "hhtekf/cli.hpp"

namespace hhtekf::cli {

namespace {

using json = nlohmann::json;
namespace fs = std::filesystem;

constexpr int kSchemaVersion = 1;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

json num(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json num_array(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) {
    out.push_back(num(x));
  }
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream out(path);
  if (!out) {
    throw Error("io", "cannot write " + path.string());
  }
  return out;
}

void write_json(const fs::path& path, const json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

double time_of(const TimeSeries& s, std::size_t k) {
  return static_cast<double>(s.start_index + static_cast<long>(k)) / s.sample_rate_hz;
}

json config_json(const hilbert::HhtConfig& hht, const ekf::PipelineConfig& p) {
  json j;
  j["q_phasor"] = p.q_phasor;
  j["q_freq_damping"] = p.q_freq_damping;
  j["r"] = p.r;
  j["robust_cov"] = p.robust_cov;
  j["max_modes"] = p.max_modes;
  j["n_modes"] = p.n_modes ? json(*p.n_modes) : json(nullptr);
  j["prior"] = {{"phasor_var", p.init.prior.phasor_var},
                {"freq_sd_hz", p.init.prior.freq_sd_hz},
                {"damping_sd", p.init.prior.damping_sd}};
  j["init"] = {{"min_separation_hz", p.init.min_separation_hz},
               {"threshold_ratio", p.init.threshold_ratio},
               {"min_freq_hz", p.init.min_freq_hz}};
  j["dc_cutoff_hz"] = hht.dc_cutoff_hz;
  j["trend_min_cycles"] = hht.trend_min_cycles;
  j["end_margin"] = hht.end_margin;
  j["mask_freq_ratio"] = hht.mask_freq_ratio;
  j["mask_amp_ratio"] = hht.mask_amp_ratio;
  j["emd"] = {{"sd_threshold", hht.emd.sd_threshold},
              {"max_sift_iters", hht.emd.max_sift_iters},
              {"max_imfs", hht.emd.max_imfs},
              {"min_residue_extrema", hht.emd.min_residue_extrema},
              {"negligible_residue", hht.emd.negligible_residue}};
  j["peak_dynamic_range"] = spectrum::PeakConfig{}.dynamic_range;
  return j;
}

struct ModeOutput {
  std::vector<double> freq;
  std::vector<double> damping;
  std::vector<double> recon;
};

void write_trace(const fs::path& path, const TimeSeries& s, const std::vector<ModeOutput>& modes) {
  auto out = open_out(path);
  out << "k,t_seconds,mode_index,freq_rad_s,freq_hz,damping_per_s,recon\n";
  for (std::size_t m = 0; m < modes.size(); ++m) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      out << k << ',' << format_double(time_of(s, k)) << ',' << m + 1 << ','
          << format_double(modes[m].freq[k]) << ',' << format_double(modes[m].freq[k] / kTwoPi)
          << ',' << format_double(modes[m].damping[k]) << ',' << format_double(modes[m].recon[k])
          << '\n';
    }
  }
}

void write_decomposition(const fs::path& path, const TimeSeries& s,
                         const hilbert::HhtResult& result) {
  auto out = open_out(path);
  out << "k,t_seconds,measurement";
  for (const auto& c : result.components) {
    out << ",imf_" << c.imf.index;
  }
  out << ",residue\n";
  for (std::size_t k = 0; k < s.size(); ++k) {
    out << k << ',' << format_double(time_of(s, k)) << ',' << format_double(s.samples[k]);
    for (const auto& c : result.components) {
      out << ',' << format_double(c.imf.samples[k]);
    }
    out << ',' << format_double(result.residue[k]) << '\n';
  }
}

void write_truth(const fs::path& path, const TimeSeries& s, const signalgen::GroundTruth& truth) {
  auto out = open_out(path);
  out << "k,t_seconds,mode_index,freq_rad_s,damping_per_s\n";
  for (std::size_t m = 0; m < truth.n_modes(); ++m) {
    for (std::size_t k = 0; k < s.size(); ++k) {
      out << k << ',' << format_double(time_of(s, k)) << ',' << m + 1 << ','
          << format_double(truth.freq_rad_s[m][k]) << ','
          << format_double(truth.damping_per_s[m][k]) << '\n';
    }
  }
}

json components_json(const hilbert::HhtResult& r) {
  json out = json::array();
  for (const auto& c : r.components) {
    out.push_back({{"imf_index", c.imf.index},
                   {"mean_freq_rad_s", num(c.trace.mean_valid_freq())},
                   {"is_dc", c.is_dc},
                   {"converged", c.imf.converged},
                   {"sift_iterations", c.imf.sift_iterations}});
  }
  return out;
}

double mean(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) {
    s += x;
  }
  return v.empty() ? 0.0 : s / static_cast<double>(v.size());
}

json score_json(const eval::RunScore& score) {
  json modes = json::array();
  for (const auto& m : score.modes) {
    modes.push_back({{"trace_index", m.trace_index ? json(*m.trace_index + 1) : json(nullptr)},
                     {"mean_estimate_rad_s", num(m.mean_estimate)},
                     {"mean_truth_rad_s", num(m.mean_truth)},
                     {"failed", m.failed},
                     {"mse", num(m.mse)},
                     {"mse_full", num(m.mse_full)},
                     {"mse_middle_third", num(m.mse_middle_third)}});
  }
  return {{"failed", score.failed}, {"modes", modes}};
}

int fail(std::ostream& err, const Error& e, int code) {
  err << "hhtekf: " << e.stage() << ": " << e.what() << '\n';
  return code;
}

}  // namespace

void check(const Overrides& o) {
  auto positive = [](const std::optional<double>& v, const char* name) {
    if (v && !(*v > 0.0 && std::isfinite(*v))) {
      throw UsageError(std::string(name) + " must be positive");
    }
  };
  if (o.n_modes && (*o.n_modes < 1 || *o.n_modes > 16)) {
    throw UsageError("--n-modes must be in [1, 16]");
  }
  if (o.q_scale && !(*o.q_scale >= 0.0 && std::isfinite(*o.q_scale))) {
    throw UsageError("--q-scale must be non-negative");
  }
  positive(o.r, "--r");
  if (o.dc_cutoff_hz && !(*o.dc_cutoff_hz >= 0.0 && std::isfinite(*o.dc_cutoff_hz))) {
    throw UsageError("--dc-cutoff-hz must be non-negative");
  }
  positive(o.sd_threshold, "--sd-threshold");
  positive(o.mask_freq_ratio, "--mask-freq-ratio");
  if (o.mask_amp_ratio && !(*o.mask_amp_ratio >= 0.0 && std::isfinite(*o.mask_amp_ratio))) {
    throw UsageError("--mask-amp-ratio must be non-negative");
  }
  if (o.burn_in && !(*o.burn_in >= 0.0 && *o.burn_in < 1.0)) {
    throw UsageError("--burn-in must be in [0, 1)");
  }
}

void apply(const Overrides& o, hilbert::HhtConfig& hht) {
  if (o.dc_cutoff_hz) hht.dc_cutoff_hz = *o.dc_cutoff_hz;
  if (o.sd_threshold) hht.emd.sd_threshold = *o.sd_threshold;
  if (o.mask_freq_ratio) hht.mask_freq_ratio = *o.mask_freq_ratio;
  if (o.mask_amp_ratio) hht.mask_amp_ratio = *o.mask_amp_ratio;
}

void apply(const Overrides& o, ekf::PipelineConfig& pipeline) {
  apply(o, pipeline.hht);
  if (o.n_modes) pipeline.n_modes = *o.n_modes;
  if (o.q_scale) pipeline.q_phasor = pipeline.q_freq_damping = *o.q_scale;
  if (o.r) pipeline.r = *o.r;
  if (o.robust_cov) pipeline.robust_cov = *o.robust_cov;
}

std::optional<signalgen::Scenario> builtin_scenario(const std::string& name, double noise_std,
                                                    std::uint64_t seed) {
  if (name == "case_a") return signalgen::case_a(noise_std, seed);
  if (name == "case_b") return signalgen::case_b(noise_std, seed);
  return std::nullopt;
}

fs::path default_out_dir() {
  if (const char* env = std::getenv("HHTEKF_OUT_DIR"); env && *env) {
    return env;
  }
  return ".";
}

int analyze(const AnalysisRequest& req, std::ostream& err) {
  std::optional<signalgen::Scenario> scenario;
  TimeSeries series;
  eval::Method method{};
  ekf::PipelineConfig pipeline;
  try {
    if (req.scenario.has_value() == req.input.has_value()) {
      throw UsageError("give exactly one of --scenario or --input");
    }
    const auto parsed = eval::parse_method(req.method);
    if (!parsed) {
      throw UsageError("unknown method '" + req.method + "' (hht, masking, ekf, hht-ekf)");
    }
    method = *parsed;
    check(req.overrides);
    apply(req.overrides, pipeline);
    if (req.scenario) {
      if (!(req.noise_std >= 0.0 && std::isfinite(req.noise_std))) {
        throw UsageError("--noise-std must be non-negative");
      }
      scenario = builtin_scenario(*req.scenario, req.noise_std, req.seed);
      if (!scenario) {
        throw UsageError("unknown scenario '" + *req.scenario + "' (case_a, case_b)");
      }
      series = scenario->series;
    } else {
      series = ingest_csv(*req.input, req.fs);
    }
  } catch (const Error& e) {
    return fail(err, e, kExitUsage);
  }

  json report;
  report["schema_version"] = kSchemaVersion;
  report["method"] = std::string(eval::to_string(method));
  if (scenario) {
    report["input"] = {{"source", "scenario"},
                       {"name", *req.scenario},
                       {"seed", req.seed},
                       {"noise_std", req.noise_std}};
  } else {
    report["input"] = {{"source", "csv"}, {"path", req.input->string()}};
  }
  report["input"]["n_samples"] = series.size();
  report["input"]["sample_rate_hz"] = series.sample_rate_hz;
  report["config"] = config_json(pipeline.hht, pipeline);

  std::error_code ec;
  fs::create_directories(req.out_dir, ec);
  const auto report_path = req.out_dir / "report.json";
  int code = kExitOk;
  try {
    write_series_csv(req.out_dir / "input.csv", series);
    if (scenario) {
      write_truth(req.out_dir / "truth.csv", series, scenario->truth);
    }

    std::vector<ModeOutput> modes;
    hilbert::HhtResult decomposition;
    std::size_t scored_from = 0;
    if (method == eval::Method::ekf) {
      const auto result = ekf::run_hht_ekf(series, pipeline);
      decomposition = result.decomposition;
      for (const auto& m : result.trace.modes) {
        modes.push_back({m.freq_rad_s, m.damping_per_s, m.recon});
      }
      json init = json::array();
      for (const auto& p : result.init.peaks) {
        init.push_back({{"freq_rad_s", p.freq_rad_s},
                        {"freq_hz", p.freq_rad_s / kTwoPi},
                        {"amplitude", p.amplitude},
                        {"phase_rad", p.phase_rad}});
      }
      report["initialization"] = init;
      double innov = 0.0;
      for (double v : result.trace.innovation) {
        innov += v * v;
      }
      report["ekf"] = {
          {"innovation_rms", std::sqrt(innov / static_cast<double>(series.size()))},
          {"max_asymmetry", result.trace.max_asymmetry}};
      scored_from = static_cast<std::size_t>(
          std::floor((req.overrides.burn_in.value_or(0.1)) * static_cast<double>(series.size())));
    } else {
      decomposition = method == eval::Method::hht ? hilbert::hht(series, pipeline.hht)
                                                  : hilbert::masking_hht(series, pipeline.hht);
      for (const auto* c : decomposition.oscillatory()) {
        modes.push_back({c->trace.freq_rad_s, c->trace.damping_per_s, c->imf.samples});
      }
      if (method == eval::Method::masking) {
        report["mask"] = {{"freq_rad_s", decomposition.mask_freq_rad_s},
                          {"amplitude", decomposition.mask_amp}};
      }
    }
    report["status"] = "ok";
    report["n_modes"] = modes.size();
    report["components"] = components_json(decomposition);
    json mode_summary = json::array();
    for (std::size_t m = 0; m < modes.size(); ++m) {
      mode_summary.push_back({{"mode_index", m + 1},
                              {"mean_freq_rad_s", num(mean(modes[m].freq))},
                              {"final_freq_rad_s", num(modes[m].freq.back())},
                              {"final_freq_hz", num(modes[m].freq.back() / kTwoPi)},
                              {"final_damping_per_s", num(modes[m].damping.back())}});
    }
    report["modes"] = mode_summary;
    if (scenario) {
      std::vector<std::vector<double>> traces;
      for (const auto& m : modes) {
        traces.push_back(m.freq);
      }
      report["score"] = score_json(eval::score_run(method, req.seed, traces, scenario->truth, scored_from));
      report["score"]["scored_from"] = scored_from;
    }
    write_trace(req.out_dir / "trace.csv", series, modes);
    write_decomposition(req.out_dir / "decomposition.csv", series, decomposition);
  } catch (const ekf::DivergenceError& e) {
    report["status"] = "diverged";
    report["error"] = {{"stage", e.stage()}, {"message", e.what()}, {"sample_index", e.sample_index()}};
    code = fail(err, e, kExitAnalysisFailure);
  } catch (const ekf::NoOscillationError& e) {
    report["status"] = "no_oscillation";
    report["error"] = {{"stage", e.stage()}, {"message", e.what()}};
    code = fail(err, e, kExitAnalysisFailure);
  } catch (const Error& e) {
    report["status"] = "error";
    report["error"] = {{"stage", e.stage()}, {"message", e.what()}};
    code = fail(err, e, kExitAnalysisFailure);
  }
  try {
    write_json(report_path, report);
  } catch (const Error& e) {
    return fail(err, e, kExitAnalysisFailure);
  }
  return code;
}

std::string format_table(int table, const std::vector<eval::ExperimentReport>& reports) {
  auto cell = [](double v) {
    char buf[32];
    if (std::isfinite(v)) {
      std::snprintf(buf, sizeof buf, "%.2f", v);
    } else {
      std::snprintf(buf, sizeof buf, "-");
    }
    return std::string(buf);
  };
  auto label = [](eval::Method m) -> std::string {
    switch (m) {
      case eval::Method::hht: return "HHT";
      case eval::Method::masking: return "Masking";
      case eval::Method::ekf: return "EKF";
    }
    return "?";
  };
  std::vector<std::string> head;
  std::vector<std::vector<std::string>> rows;
  if (table == 1) {
    head = {"Method", "MSE w1", "MSE w2", "Mixing rate"};
  } else {
    head = {"Method", "MSE w1", "MSE w1 of the middle third", "MSE w1 full window"};
  }
  for (const auto& r : reports) {
    std::vector<std::string> row{label(r.method)};
    auto at = [](const std::vector<double>& v, std::size_t i) {
      return i < v.size() ? v[i] : std::nan("");
    };
    if (table == 1) {
      char rate[32];
      std::snprintf(rate, sizeof rate, "%.1f%%", 100.0 * r.failure_rate);
      row.insert(row.end(), {cell(at(r.mse, 0)), cell(at(r.mse, 1)), rate});
    } else {
      row.insert(row.end(), {cell(at(r.mse, 0)), cell(at(r.mse_middle_third, 0)),
                             cell(at(r.mse_full, 0))});
    }
    rows.push_back(row);
  }
  std::vector<std::size_t> width(head.size());
  for (std::size_t c = 0; c < head.size(); ++c) {
    width[c] = head[c].size();
    for (const auto& row : rows) {
      width[c] = std::max(width[c], row[c].size());
    }
  }
  std::ostringstream out;
  auto line = [&](const std::vector<std::string>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c == 0) {
        out << row[c] << std::string(width[c] - row[c].size(), ' ');
      } else {
        out << " | " << std::string(width[c] - row[c].size(), ' ') << row[c];
      }
    }
    out << '\n';
  };
  line(head);
  std::size_t total = 0;
  for (auto w : width) total += w;
  out << std::string(total + 3 * (width.size() - 1), '-') << '\n';
  for (const auto& row : rows) {
    line(row);
  }
  if (!reports.empty()) {
    const auto& r = reports.front();
    out << "MSE in rad^2/s^2 over runs without a failed mode; " << r.n_runs << " runs, seeds "
        << r.base_seed << ".." << r.base_seed + r.n_runs - 1 << ".\n";
    for (const auto& rep : reports) {
      if (rep.scored_from > 0) {
        out << label(rep.method) << " MSE skips the first " << rep.scored_from
            << " samples (burn-in); the full-window value is in the JSON report.\n";
      }
    }
  }
  return out.str();
}

int reproduce(const ReproduceRequest& req, std::ostream& out, std::ostream& err) {
  eval::ExperimentConfig cfg;
  try {
    if (req.table != 1 && req.table != 2) {
      throw UsageError("table must be t1 or t2");
    }
    if (req.runs < 1) {
      throw UsageError("--runs must be at least 1");
    }
    if (!(req.noise_std >= 0.0 && std::isfinite(req.noise_std))) {
      throw UsageError("--noise-std must be non-negative");
    }
    check(req.overrides);
  } catch (const Error& e) {
    return fail(err, e, kExitUsage);
  }
  cfg.noise_std = req.noise_std;
  cfg.workers = std::max<std::size_t>(1, req.workers);
  apply(req.overrides, cfg.hht);
  apply(req.overrides, cfg.ekf);
  cfg.ekf.hht = cfg.hht;
  if (req.overrides.n_modes) {
    cfg.ekf_modes_from_truth = false;
  }
  if (req.overrides.burn_in) {
    cfg.burn_in_fraction = *req.overrides.burn_in;
  }
  const auto experiment = req.table == 1 ? eval::Experiment::case_a : eval::Experiment::case_b;
  const std::vector<eval::Method> methods{eval::Method::hht, eval::Method::masking, eval::Method::ekf};

  try {
    const auto reports = eval::monte_carlo(experiment, methods, req.runs, req.seed, cfg);
    std::error_code ec;
    fs::create_directories(req.out_dir, ec);
    const std::string stem = "table" + std::to_string(req.table);

    json j;
    j["schema_version"] = kSchemaVersion;
    j["table"] = "t" + std::to_string(req.table);
    j["experiment"] = std::string(eval::to_string(experiment));
    j["n_runs"] = req.runs;
    j["base_seed"] = req.seed;
    j["noise_std"] = req.noise_std;
    j["config"] = config_json(cfg.hht, cfg.ekf);
    j["config"]["burn_in_fraction"] = cfg.burn_in_fraction;
    j["config"]["ekf_modes_from_truth"] = cfg.ekf_modes_from_truth;
    j["config"]["include_failed_in_mse"] = cfg.include_failed_in_mse;
    json rows = json::array();
    for (const auto& r : reports) {
      rows.push_back({{"method", std::string(eval::to_string(r.method))},
                      {"n_runs", r.n_runs},
                      {"failure_rate", r.failure_rate},
                      {"n_failed", r.n_failed},
                      {"n_errored", r.n_errored},
                      {"n_aggregated", r.n_aggregated},
                      {"scored_from", r.scored_from},
                      {"mse", num_array(r.mse)},
                      {"mse_full", num_array(r.mse_full)},
                      {"mse_middle_third", num_array(r.mse_middle_third)}});
    }
    j["methods"] = rows;
    write_json(req.out_dir / (stem + ".json"), j);

    const auto text = format_table(req.table, reports);
    open_out(req.out_dir / (stem + ".txt")) << text;
    out << text;

    auto runs = open_out(req.out_dir / "runs.csv");
    runs << "method,run,seed,mode_index,trace_index,mean_estimate_rad_s,mean_truth_rad_s,"
            "mode_failed,mse,mse_full,mse_middle_third,run_failed,errored,error\n";
    for (const auto& r : reports) {
      for (std::size_t i = 0; i < r.runs.size(); ++i) {
        const auto& run = r.runs[i];
        std::string error = run.error;
        for (auto& ch : error) {
          if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
        }
        for (std::size_t m = 0; m < run.modes.size(); ++m) {
          const auto& s = run.modes[m];
          runs << eval::to_string(r.method) << ',' << i << ',' << run.seed << ',' << m + 1 << ','
               << (s.trace_index ? std::to_string(*s.trace_index + 1) : std::string()) << ','
               << format_double(s.mean_estimate) << ',' << format_double(s.mean_truth) << ','
               << int(s.failed) << ',' << format_double(s.mse) << ',' << format_double(s.mse_full)
               << ',' << format_double(s.mse_middle_third) << ',' << int(run.failed) << ','
               << int(run.errored) << ',' << error << '\n';
        }
      }
    }
  } catch (const Error& e) {
    return fail(err, e, kExitAnalysisFailure);
  }
  return kExitOk;
}

int generate(const GenerateRequest& req, std::ostream& err) {
  try {
    if (!(req.noise_std >= 0.0 && std::isfinite(req.noise_std))) {
      throw UsageError("--noise-std must be non-negative");
    }
    const auto scenario = builtin_scenario(req.scenario, req.noise_std, req.seed);
    if (!scenario) {
      throw UsageError("unknown scenario '" + req.scenario + "' (case_a, case_b)");
    }
    std::error_code ec;
    fs::create_directories(req.out_dir, ec);
    write_series_csv(req.out_dir / "signal.csv", scenario->series);
    write_truth(req.out_dir / "truth.csv", scenario->series, scenario->truth);
  } catch (const UsageError& e) {
    return fail(err, e, kExitUsage);
  } catch (const Error& e) {
    return fail(err, e, kExitAnalysisFailure);
  }
  return kExitOk;
}

namespace {

struct PanelRow {
  std::string series;
  double t;
  double value;
};

void write_panel(const fs::path& path, const std::vector<PanelRow>& rows) {
  auto out = open_out(path);
  out << "series_name,t,value\n";
  for (const auto& r : rows) {
    out << r.series << ',' << format_double(r.t) << ',' << format_double(r.value) << '\n';
  }
}

std::string label_for(const fs::path& trace) {
  const auto report = trace.parent_path() / "report.json";
  std::ifstream in(report);
  if (in) {
    const auto j = json::parse(in, nullptr, false);
    if (!j.is_discarded() && j.contains("method") && j["method"].is_string()) {
      return j["method"].get<std::string>();
    }
  }
  const auto parent = trace.parent_path().filename().string();
  return parent.empty() ? "trace" : parent;
}

// Rows of a per-mode long table as (mode, t, value) series.
void append_modes(const Table& t, const std::string& prefix, const std::string& value_col,
                  std::vector<PanelRow>& rows) {
  const auto mode = t.column("mode_index");
  const auto time = t.column("t_seconds");
  const auto value = t.column(value_col);
  for (const auto& r : t.rows) {
    rows.push_back({prefix + "mode_" + std::to_string(std::lround(r[mode])), r[time], r[value]});
  }
}

}  // namespace

int plotdata(const std::vector<fs::path>& traces, const fs::path& out_dir, std::ostream& err) {
  try {
    if (traces.empty()) {
      throw UsageError("give at least one trace.csv");
    }
    std::vector<PanelRow> freq, damping, measurement;
    bool have_truth = false;
    bool have_measurement = false;
    std::map<std::string, int> seen;
    for (const auto& path : traces) {
      const auto table = read_table(path);
      for (const char* col : {"k", "t_seconds", "mode_index", "freq_rad_s", "freq_hz",
                              "damping_per_s", "recon"}) {
        table.column(col);
      }
      auto label = label_for(path);
      if (seen[label]++ > 0) {
        label += "_" + std::to_string(seen[label]);
      }
      append_modes(table, label + ":", "freq_rad_s", freq);
      append_modes(table, label + ":", "damping_per_s", damping);

      const auto dir = path.parent_path();
      if (!have_truth && fs::exists(dir / "truth.csv")) {
        append_modes(read_table(dir / "truth.csv"), "truth:", "freq_rad_s", freq);
        have_truth = true;
      }
      if (!have_measurement && fs::exists(dir / "decomposition.csv")) {
        const auto d = read_table(dir / "decomposition.csv");
        const auto time = d.column("t_seconds");
        const auto meas = d.column("measurement");
        const auto residue = d.column("residue");
        for (const auto& r : d.rows) {
          measurement.push_back({"measurement", r[time], r[meas]});
        }
        for (const auto& r : d.rows) {
          double sum = 0.0;
          for (std::size_t c = 0; c < d.header.size(); ++c) {
            if (d.header[c].rfind("imf_", 0) == 0) sum += r[c];
          }
          measurement.push_back({"imf_sum", r[time], sum});
        }
        for (const auto& r : d.rows) {
          measurement.push_back({"residue", r[time], r[residue]});
        }
        have_measurement = true;
      }
    }
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    write_panel(out_dir / "panel_frequency.csv", freq);
    write_panel(out_dir / "panel_damping.csv", damping);
    if (have_measurement) {
      write_panel(out_dir / "panel_measurement.csv", measurement);
    }
  } catch (const UsageError& e) {
    return fail(err, e, kExitUsage);
  } catch (const CsvError& e) {
    return fail(err, e, kExitUsage);
  } catch (const Error& e) {
    return fail(err, e, kExitAnalysisFailure);
  }
  return kExitOk;
}

}  // namespace hhtekf::cli
