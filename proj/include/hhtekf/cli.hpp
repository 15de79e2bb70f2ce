#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hhtekf/eval.hpp"
#include "hhtekf/signalgen.hpp"
#include "hhtekf/time_series.hpp"

namespace hhtekf::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysisFailure = 1;
inline constexpr int kExitUsage = 2;

// Bad CLI input (unknown method, out-of-range override, missing source).
class UsageError : public Error {
public:
  explicit UsageError(const std::string& what) : Error("usage", what) {}
};

// Malformed CSV. line() is 1-based; 0 when the problem is not tied to a row.
class CsvError : public Error {
public:
  CsvError(std::size_t line, const std::string& what)
      : Error("csv", line ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  std::size_t line() const noexcept { return line_; }

private:
  std::size_t line_;
};

// 17 significant digits, enough to parse back to the same double.
std::string format_double(double v);

// Accepts `time,value` rows (rate inferred from the timestamps) or a single
// `value` column, which needs `fs`. A non-numeric first row is a header. Blank
// lines and lines starting with '#' are skipped.
TimeSeries parse_csv(std::istream& in, std::optional<double> fs);
TimeSeries ingest_csv(const std::filesystem::path& path, std::optional<double> fs);

// CSV with a mandatory header row and numeric cells everywhere else.
struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  // Index of `name` in the header; throws CsvError when absent.
  std::size_t column(const std::string& name) const;
};
Table read_table(const std::filesystem::path& path);

// time,value with a header row; time = (start_index + k) / fs.
void write_series_csv(const std::filesystem::path& path, const TimeSeries& series);

// Knobs shared by analyze and reproduce. Unset fields keep library defaults.
struct Overrides {
  std::optional<std::size_t> n_modes;
  std::optional<double> q_scale;  // Q = q_scale * I
  std::optional<double> r;
  std::optional<double> dc_cutoff_hz;
  std::optional<double> sd_threshold;
  std::optional<double> mask_freq_ratio;
  std::optional<double> mask_amp_ratio;
  std::optional<double> burn_in;  // fraction of the record skipped when scoring ekf
  std::optional<bool> robust_cov;
};

// Throws UsageError for values outside their documented ranges.
void check(const Overrides& o);
void apply(const Overrides& o, hilbert::HhtConfig& hht);
void apply(const Overrides& o, ekf::PipelineConfig& pipeline);

std::optional<signalgen::Scenario> builtin_scenario(const std::string& name, double noise_std,
                                                    std::uint64_t seed);

struct AnalysisRequest {
  std::optional<std::string> scenario;
  std::optional<std::filesystem::path> input;
  std::optional<double> fs;
  std::string method = "hht-ekf";
  double noise_std = 0.1;
  std::uint64_t seed = 1;
  Overrides overrides;
  std::filesystem::path out_dir;
};

// Writes input.csv, trace.csv, decomposition.csv, report.json (plus truth.csv
// for built-in scenarios). Returns an exit code; diagnostics go to `err`.
int analyze(const AnalysisRequest& request, std::ostream& err);

struct ReproduceRequest {
  int table = 1;  // 1: case_a, 2: case_b
  std::size_t runs = 1000;
  std::uint64_t seed = 42;
  double noise_std = 0.1;
  std::size_t workers = 1;
  Overrides overrides;
  std::filesystem::path out_dir;
};

// Writes tableN.json, tableN.txt and runs.csv; echoes the text table to `out`.
int reproduce(const ReproduceRequest& request, std::ostream& out, std::ostream& err);

struct GenerateRequest {
  std::string scenario = "case_a";
  double noise_std = 0.1;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir;
};

// Writes signal.csv and truth.csv.
int generate(const GenerateRequest& request, std::ostream& err);

// Reads trace.csv files and writes panel_frequency.csv, panel_damping.csv and,
// when the sibling decomposition.csv exists, panel_measurement.csv. A sibling
// truth.csv adds truth series to the frequency panel.
int plotdata(const std::vector<std::filesystem::path>& traces,
             const std::filesystem::path& out_dir, std::ostream& err);

// Aligned text table: one row per method, MSE and mixing-rate columns.
std::string format_table(int table, const std::vector<eval::ExperimentReport>& reports);

// Output directory when --out-dir is absent: $HHTEKF_OUT_DIR, else ".".
std::filesystem::path default_out_dir();

}  // namespace hhtekf::cli
