// Copyright 2026 The SensorHub Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

/// Benchmark results: raw JSON persistence, CSV summary and SVG charts.
/// Byte figures are HTTP response body bytes, not wire packets.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "sensorhub/bench/config.hpp"
#include "sensorhub/bench/cpu.hpp"

namespace sensorhub::bench {

inline constexpr std::string_view kCsvHeader =
    "protocol,mode,step,requests,mean_ms,median_ms,p95_ms,total_bytes,mean_bytes,mean_cpu_pct,max_cpu_pct";

struct StepResult {
  Protocol protocol = Protocol::StaDefault;
  Mode mode = Mode::OneRequestNItems;
  std::size_t step = 0;
  /// How many times the step's items were retrieved.
  std::size_t passes = 1;
  std::vector<double> latencies_ms;
  std::vector<std::size_t> body_bytes;
  std::map<int, std::size_t> statuses;
  std::vector<CpuSample> cpu;
  /// Set when a non-success status aborted the step.
  std::optional<std::string> error;

  std::size_t requests() const { return latencies_ms.size(); }
  /// Body bytes for one retrieval of the step's items.
  std::size_t total_bytes() const {
    return std::accumulate(body_bytes.begin(), body_bytes.end(), std::size_t{0}) / std::max<std::size_t>(passes, 1);
  }
};

struct Environment {
  std::string host;
  std::string timestamp;
  std::string server_version;
};

struct BenchmarkReport {
  ExperimentConfig config;
  std::vector<StepResult> steps;
  Environment environment;
};

struct Summary {
  double mean = 0;
  double median = 0;
  double p95 = 0;
};

/// Mean, median (midpoint of the two central values for even counts) and
/// nearest-rank 95th percentile.
inline Summary summarize(std::vector<double> xs) {
  Summary s;
  if (xs.empty()) return s;
  std::sort(xs.begin(), xs.end());
  s.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  const std::size_t n = xs.size();
  s.median = n % 2 ? xs[n / 2] : (xs[n / 2 - 1] + xs[n / 2]) / 2;
  const auto rank = static_cast<std::size_t>(std::ceil(0.95 * static_cast<double>(n)));
  s.p95 = xs[std::max<std::size_t>(rank, 1) - 1];
  return s;
}

namespace detail {

inline std::string fixed(double v, int digits = 3) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

inline std::string hostname() {
  char buf[256] = {};
  if (gethostname(buf, sizeof buf - 1) != 0) return "unknown";
  return buf;
}

}  // namespace detail

inline Environment capture_environment(std::string server_version) {
  return {detail::hostname(), format_instant(now_utc()), std::move(server_version)};
}

inline std::string to_csv(const BenchmarkReport& r) {
  std::string out(kCsvHeader);
  out += '\n';
  for (const auto& s : r.steps) {
    const auto lat = summarize(s.latencies_ms);
    const auto n = s.requests();
    out += std::string(to_string(s.protocol)) + "," + std::string(to_string(s.mode)) + "," + std::to_string(s.step) +
           "," + std::to_string(n) + "," + detail::fixed(lat.mean) + "," + detail::fixed(lat.median) + "," +
           detail::fixed(lat.p95) + "," + std::to_string(s.total_bytes()) + "," +
           detail::fixed(n ? static_cast<double>(std::accumulate(s.body_bytes.begin(), s.body_bytes.end(), std::size_t{0})) /
                                   static_cast<double>(n)
                             : 0.0,
                           1) + ",";
    if (!s.cpu.empty()) {
      double sum = 0, mx = 0;
      for (const auto& c : s.cpu) {
        sum += c.percent;
        mx = std::max(mx, c.percent);
      }
      out += detail::fixed(sum / static_cast<double>(s.cpu.size()), 2) + "," + detail::fixed(mx, 2);
    } else {
      out += ",";
    }
    out += '\n';
  }
  return out;
}

inline json to_json(const StepResult& s) {
  json cpu = json::array();
  for (const auto& c : s.cpu) cpu.push_back({format_instant(c.at), c.percent});
  json statuses = json::object();
  for (const auto& [code, n] : s.statuses) statuses[std::to_string(code)] = n;
  json j = {{"protocol", to_string(s.protocol)},
            {"mode", to_string(s.mode)},
            {"step", s.step},
            {"passes", s.passes},
            {"latenciesMs", s.latencies_ms},
            {"bodyBytes", s.body_bytes},
            {"statuses", statuses},
            {"cpu", cpu}};
  j["error"] = s.error ? json(*s.error) : json(nullptr);
  return j;
}

inline StepResult step_from_json(const json& j) {
  StepResult s;
  s.protocol = protocol_from(j.at("protocol").get<std::string>());
  s.mode = mode_from(j.at("mode").get<std::string>());
  s.step = j.at("step").get<std::size_t>();
  s.passes = j.at("passes").get<std::size_t>();
  s.latencies_ms = j.at("latenciesMs").get<std::vector<double>>();
  s.body_bytes = j.at("bodyBytes").get<std::vector<std::size_t>>();
  for (const auto& [code, n] : j.at("statuses").items()) s.statuses[std::stoi(code)] = n.get<std::size_t>();
  for (const auto& c : j.at("cpu"))
    s.cpu.push_back({parse_instant(c.at(0).get<std::string>()).value_or(Instant{}), c.at(1).get<double>()});
  if (!j.at("error").is_null()) s.error = j.at("error").get<std::string>();
  return s;
}

inline json to_json(const BenchmarkReport& r) {
  json steps = json::array();
  for (const auto& s : r.steps) steps.push_back(to_json(s));
  return {{"config", to_json(r.config)},
          {"environment",
           {{"host", r.environment.host},
            {"timestamp", r.environment.timestamp},
            {"serverVersion", r.environment.server_version}}},
          {"units", {{"latency", "milliseconds"}, {"bytes", "HTTP response body bytes"}}},
          {"steps", steps}};
}

inline BenchmarkReport report_from_json(const json& j) {
  BenchmarkReport r;
  r.config = config_from_json(j.at("config"));
  const auto& env = j.at("environment");
  r.environment = {env.at("host").get<std::string>(), env.at("timestamp").get<std::string>(),
                   env.at("serverVersion").get<std::string>()};
  for (const auto& s : j.at("steps")) r.steps.push_back(step_from_json(s));
  return r;
}

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string(), path.string());
}

inline BenchmarkReport load_report(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::IoError, "cannot read " + path.string(), path.string());
  const json j = json::parse(in, nullptr, false);
  if (j.is_discarded()) throw Error(Errc::BadConfig, path.string() + " is not a benchmark report", path.string());
  try {
    return report_from_json(j);
  } catch (const json::exception& e) {
    throw Error(Errc::BadConfig, path.string() + ": " + e.what(), path.string());
  }
}

// ---------------------------------------------------------------- charts

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
};

namespace detail {

inline std::string svg_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

inline std::string tick_label(double v) {
  if (std::fabs(v) >= 10000) return fixed(v / 1000, 0) + "k";
  if (std::fabs(v) >= 100 || v == std::floor(v)) return fixed(v, 0);
  return fixed(v, 2);
}

}  // namespace detail

/// A plain line chart: linear axes starting at zero, one polyline and
/// legend entry per series.
inline std::string line_chart(const std::string& title, const std::string& x_label, const std::string& y_label,
                              const std::vector<Series>& series) {
  constexpr double W = 720, H = 440, L = 80, R = 170, T = 40, B = 60;
  static constexpr const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};
  double xmax = 0, ymax = 0;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      xmax = std::max(xmax, x);
      ymax = std::max(ymax, y);
    }
  if (xmax <= 0) xmax = 1;
  if (ymax <= 0) ymax = 1;
  ymax *= 1.05;
  const auto px = [&](double x) { return L + x / xmax * (W - L - R); };
  const auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };

  std::ostringstream o;
  o << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" viewBox=\"0 0 " << W
    << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  o << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  o << "<text x=\"" << W / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">" << detail::svg_escape(title)
    << "</text>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << H - B << "\" x2=\"" << W - R << "\" y2=\"" << H - B
    << "\" stroke=\"black\"/>\n";
  o << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << H - B << "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double xv = xmax * i / 5, yv = ymax * i / 5;
    o << "<text x=\"" << px(xv) << "\" y=\"" << H - B + 16 << "\" text-anchor=\"middle\">" << detail::tick_label(xv)
      << "</text>\n";
    o << "<text x=\"" << L - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\">" << detail::tick_label(yv)
      << "</text>\n";
    o << "<line x1=\"" << L << "\" y1=\"" << py(yv) << "\" x2=\"" << W - R << "\" y2=\"" << py(yv)
      << "\" stroke=\"#e0e0e0\"/>\n";
  }
  o << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 18 << "\" text-anchor=\"middle\">"
    << detail::svg_escape(x_label) << "</text>\n";
  o << "<text transform=\"translate(18," << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
    << detail::svg_escape(y_label) << "</text>\n";
  for (std::size_t i = 0; i < series.size(); ++i) {
    const auto* color = colors[i % std::size(colors)];
    o << "<polyline class=\"series\" data-name=\"" << detail::svg_escape(series[i].name) << "\" fill=\"none\" stroke=\""
      << color << "\" stroke-width=\"2\" points=\"";
    for (const auto& [x, y] : series[i].points) o << detail::fixed(px(x), 1) << ',' << detail::fixed(py(y), 1) << ' ';
    o << "\"/>\n";
    for (const auto& [x, y] : series[i].points)
      o << "<circle cx=\"" << detail::fixed(px(x), 1) << "\" cy=\"" << detail::fixed(py(y), 1) << "\" r=\"2.5\" fill=\""
        << color << "\"/>\n";
    const double ly = T + 10 + 18.0 * static_cast<double>(i);
    o << "<rect x=\"" << W - R + 14 << "\" y=\"" << ly - 9 << "\" width=\"12\" height=\"12\" fill=\"" << color
      << "\"/>\n";
    o << "<text x=\"" << W - R + 32 << "\" y=\"" << ly + 1 << "\">" << detail::svg_escape(series[i].name)
      << "</text>\n";
  }
  o << "</svg>\n";
  return o.str();
}

inline std::vector<Series> latency_series(const BenchmarkReport& r) {
  std::vector<Series> out;
  for (auto p : r.config.protocols) {
    Series s{std::string(to_string(p)), {}};
    for (const auto& st : r.steps)
      if (st.protocol == p) s.points.emplace_back(static_cast<double>(st.step), summarize(st.latencies_ms).mean);
    out.push_back(std::move(s));
  }
  return out;
}

inline std::vector<Series> bytes_series(const BenchmarkReport& r) {
  std::vector<Series> out;
  for (auto p : r.config.protocols) {
    Series s{std::string(to_string(p)), {}};
    for (const auto& st : r.steps)
      if (st.protocol == p) s.points.emplace_back(static_cast<double>(st.step), static_cast<double>(st.total_bytes()));
    out.push_back(std::move(s));
  }
  return out;
}

/// CPU samples against seconds since the first sample of the run.
inline std::vector<Series> cpu_series(const BenchmarkReport& r) {
  std::optional<Instant> origin;
  for (const auto& st : r.steps)
    for (const auto& c : st.cpu)
      if (!origin || c.at < *origin) origin = c.at;
  std::vector<Series> out;
  for (auto p : r.config.protocols) {
    Series s{std::string(to_string(p)), {}};
    for (const auto& st : r.steps)
      if (st.protocol == p)
        for (const auto& c : st.cpu)
          s.points.emplace_back(std::chrono::duration<double>(c.at - *origin).count(), c.percent);
    out.push_back(std::move(s));
  }
  return out;
}

struct EmitFormats {
  bool csv = true;
  bool svg = true;
};

/// Writes summary.csv and latency.svg / bytes.svg / cpu.svg into `dir`.
/// Returns the written paths.
inline std::vector<std::filesystem::path> emit_report(const BenchmarkReport& r, const std::filesystem::path& dir,
                                                      EmitFormats formats = {}) {
  std::vector<std::filesystem::path> written;
  if (formats.csv) {
    write_file(dir / "summary.csv", to_csv(r));
    written.push_back(dir / "summary.csv");
  }
  if (formats.svg) {
    const auto mode = std::string(to_string(r.config.mode));
    write_file(dir / "latency.svg", line_chart("Mean latency (" + mode + ")", "step", "milliseconds", latency_series(r)));
    write_file(dir / "bytes.svg",
               line_chart("Response body bytes per step (" + mode + ")", "step", "total body bytes", bytes_series(r)));
    write_file(dir / "cpu.svg", line_chart("Server CPU", "seconds", "percent of one core", cpu_series(r)));
    for (const char* f : {"latency.svg", "bytes.svg", "cpu.svg"}) written.push_back(dir / f);
  }
  return written;
}

}  // namespace sensorhub::bench
