#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string_view>

#include "hhtekf/cli.hpp"

namespace hhtekf::cli {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) {
    return {};
  }
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::optional<double> parse_number(std::string_view cell) {
  cell = trim(cell);
  if (!cell.empty() && cell.front() == '+') {
    cell.remove_prefix(1);
  }
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
  if (cell.empty() || ec != std::errc{} || ptr != cell.data() + cell.size() || !std::isfinite(v)) {
    return std::nullopt;
  }
  return v;
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> cells;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    cells.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) {
      return cells;
    }
    start = comma + 1;
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

TimeSeries parse_csv(std::istream& in, std::optional<double> fs) {
  std::vector<double> times;
  std::vector<double> values;
  std::vector<std::size_t> lines;  // file line of each data row
  std::size_t columns = 0;
  std::size_t line_no = 0;
  bool seen_row = false;
  std::string line;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty() || text.front() == '#') {
      continue;
    }
    const auto cells = split(text);
    std::vector<std::optional<double>> parsed;
    for (auto c : cells) {
      parsed.push_back(parse_number(c));
    }
    const bool numeric = std::all_of(parsed.begin(), parsed.end(), [](auto& p) { return p.has_value(); });
    if (!seen_row) {
      seen_row = true;
      if (cells.size() != 1 && cells.size() != 2) {
        throw CsvError(line_no, "expected 1 or 2 columns, found " + std::to_string(cells.size()));
      }
      columns = cells.size();
      if (!numeric) {
        continue;  // header
      }
    }
    if (cells.size() != columns) {
      throw CsvError(line_no, "expected " + std::to_string(columns) + " columns, found " +
                                  std::to_string(cells.size()));
    }
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (!parsed[i]) {
        throw CsvError(line_no, "not a finite number: '" + std::string(trim(cells[i])) + "'");
      }
    }
    if (columns == 2) {
      times.push_back(*parsed[0]);
    }
    values.push_back(*parsed.back());
    lines.push_back(line_no);
  }
  if (values.empty()) {
    throw CsvError(0, "no data rows");
  }

  TimeSeries out;
  out.samples = std::move(values);
  if (columns == 1) {
    if (!fs) {
      throw CsvError(0, "single-column input needs a sample rate (--fs)");
    }
    out.sample_rate_hz = *fs;
  } else {
    if (times.size() < 2) {
      throw CsvError(0, "need at least two timestamps to infer the sample rate");
    }
    const double span = times.back() - times.front();
    const double dt = span / static_cast<double>(times.size() - 1);
    if (!(dt > 0.0)) {
      throw CsvError(0, "timestamps must increase");
    }
    // Deviation from the uniform grid, relative to the record span.
    const double tol = 1e-6 * span;
    for (std::size_t k = 0; k < times.size(); ++k) {
      const double expected = times.front() + dt * static_cast<double>(k);
      if (std::abs(times[k] - expected) > tol) {
        throw CsvError(lines[k], "timestamp " + format_double(times[k]) + " is off the uniform grid (expected " +
                                     format_double(expected) + ")");
      }
    }
    out.sample_rate_hz = 1.0 / dt;
    if (fs && std::abs(*fs - out.sample_rate_hz) > 1e-6 * *fs) {
      throw CsvError(0, "--fs " + format_double(*fs) + " disagrees with the timestamps (" +
                            format_double(out.sample_rate_hz) + " Hz)");
    }
    out.start_index = std::lround(times.front() * out.sample_rate_hz);
  }
  if (!(out.sample_rate_hz > 0.0) || !std::isfinite(out.sample_rate_hz)) {
    throw CsvError(0, "sample rate must be positive");
  }
  return out;
}

TimeSeries ingest_csv(const std::filesystem::path& path, std::optional<double> fs) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError(0, "cannot open " + path.string());
  }
  return parse_csv(in, fs);
}

std::size_t Table::column(const std::string& name) const {
  const auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw CsvError(1, "missing column '" + name + "'");
  }
  return static_cast<std::size_t>(it - header.begin());
}

Table read_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError(0, "cannot open " + path.string());
  }
  Table t;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = trim(line);
    if (text.empty()) {
      continue;
    }
    const auto cells = split(text);
    if (t.header.empty()) {
      for (auto c : cells) {
        t.header.emplace_back(trim(c));
      }
      continue;
    }
    if (cells.size() != t.header.size()) {
      throw CsvError(line_no, "expected " + std::to_string(t.header.size()) + " columns, found " +
                                  std::to_string(cells.size()));
    }
    auto& row = t.rows.emplace_back();
    for (auto c : cells) {
      const auto v = parse_number(c);
      if (!v) {
        throw CsvError(line_no, "not a finite number: '" + std::string(trim(c)) + "'");
      }
      row.push_back(*v);
    }
  }
  if (t.header.empty()) {
    throw CsvError(0, path.string() + " is empty");
  }
  return t;
}

void write_series_csv(const std::filesystem::path& path, const TimeSeries& series) {
  std::ofstream out(path);
  if (!out) {
    throw Error("io", "cannot write " + path.string());
  }
  out << "time,value\n";
  for (std::size_t k = 0; k < series.size(); ++k) {
    const double t = static_cast<double>(series.start_index + static_cast<long>(k)) / series.sample_rate_hz;
    out << format_double(t) << ',' << format_double(series.samples[k]) << '\n';
  }
}

}  // namespace hhtekf::cli
