#pragma once

// Scenario files and CSV output.
//
// A scenario file is key=value lines; '#' starts a comment. Keys are the
// ScenarioConfig field names plus `replications`. `lambda` and `protocol`
// accept comma-separated lists, expanded as a cross product with protocol as
// the outer loop.

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <string>
#include <string_view>
#include <vector>

#include "sigra/sweep.hpp"

namespace sigra {

struct ScenarioSpec {
  ScenarioConfig base;
  std::vector<double> lambdas{1.0};
  std::vector<Protocol> protocols{Protocol::signature};
  std::uint32_t replications = 1;

  std::vector<ScenarioConfig> expand() const {
    std::vector<ScenarioConfig> out;
    for (auto p : protocols)
      for (double l : lambdas) {
        auto c = base;
        c.protocol = p;
        c.lambda = l;
        out.push_back(c);
      }
    return out;
  }
};

namespace detail {

inline std::string_view trim(std::string_view s) {
  const auto ws = " \t\r\n";
  const auto b = s.find_first_not_of(ws);
  if (b == std::string_view::npos) return {};
  return s.substr(b, s.find_last_not_of(ws) - b + 1);
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  for (;;) {
    const auto c = s.find(',');
    out.push_back(trim(s.substr(0, c)));
    if (c == std::string_view::npos) break;
    s.remove_prefix(c + 1);
  }
  return out;
}

template <class N>
N parse_number(std::string_view key, std::string_view v) {
  N x{};
  const auto* end = v.data() + v.size();
  auto [p, ec] = std::from_chars(v.data(), end, x);
  if (ec != std::errc{} || p != end || v.empty())
    throw ConfigError("bad value for " + std::string(key) + ": '" + std::string(v) + "'");
  return x;
}

}  // namespace detail

// Applies one key=value; throws ConfigError for unknown keys or bad values.
inline void apply_setting(ScenarioSpec& spec, std::string_view key, std::string_view value) {
  using detail::parse_number;
  auto& c = spec.base;
  key = detail::trim(key);
  value = detail::trim(value);
  if (key == "lambda") {
    spec.lambdas.clear();
    for (auto v : detail::split_list(value)) spec.lambdas.push_back(parse_number<double>(key, v));
  } else if (key == "protocol") {
    spec.protocols.clear();
    for (auto v : detail::split_list(value)) spec.protocols.push_back(parse_protocol(v));
  } else if (key == "T") c.T = parse_number<std::uint32_t>(key, value);
  else if (key == "M") c.M = parse_number<std::uint32_t>(key, value);
  else if (key == "K") c.K = parse_number<std::uint32_t>(key, value);
  else if (key == "G_target") c.G_target = parse_number<double>(key, value);
  else if (key == "p_d") c.p_d = parse_number<double>(key, value);
  else if (key == "p_f") c.p_f = parse_number<double>(key, value);
  else if (key == "t_s") c.t_s = parse_number<double>(key, value);
  else if (key == "delta_RAO") c.delta_RAO = parse_number<std::uint32_t>(key, value);
  else if (key == "delta_RAR") c.delta_RAR = parse_number<std::uint32_t>(key, value);
  else if (key == "delta_CR") c.delta_CR = parse_number<std::uint32_t>(key, value);
  else if (key == "W") c.W = parse_number<std::uint32_t>(key, value);
  else if (key == "R") c.R = parse_number<std::uint32_t>(key, value);
  else if (key == "n_frames") c.n_frames = parse_number<std::uint32_t>(key, value);
  else if (key == "seed") c.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "replications") spec.replications = parse_number<std::uint32_t>(key, value);
  else throw ConfigError("unknown key '" + std::string(key) + "'");
}

inline void apply_assignment(ScenarioSpec& spec, std::string_view line) {
  const auto eq = line.find('=');
  if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(line) + "'");
  apply_setting(spec, line.substr(0, eq), line.substr(eq + 1));
}

inline void parse_scenario(std::istream& in, ScenarioSpec& spec, std::string_view source = "<input>") {
  std::string raw;
  for (std::size_t lineno = 1; std::getline(in, raw); ++lineno) {
    std::string_view line = raw;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = detail::trim(line);
    if (line.empty()) continue;
    try {
      apply_assignment(spec, line);
    } catch (const ConfigError& e) {
      throw ConfigError(std::string(source) + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

inline constexpr std::string_view kCsvHeader =
    "protocol,T,M,K,lambda,L,G_target,p_d,p_f,n_frames,replications,"
    "goodput_mean,goodput_ci95,reliability_mean,reliability_ci95,"
    "latency_ms_mean,latency_ms_ci95,messages_mean,messages_ci95,"
    "false_positives_total,collisions_total";

namespace detail {

inline std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

inline std::string num(double x) { return fmt("%.6g", x); }

inline void metric(std::ostream& os, const std::optional<AggregateMetrics>& a, MetricSummary AggregateMetrics::*m) {
  if (!a) {
    os << ",NA,NA";
    return;
  }
  const auto& s = (*a).*m;
  os << ',' << fmt("%.6f", s.mean) << ',' << (s.has_ci() ? fmt("%.6f", s.ci95) : std::string("NA"));
}

}  // namespace detail

inline void write_csv_header(std::ostream& os) { os << kCsvHeader << '\n'; }

inline void write_csv_row(std::ostream& os, const SweepResult& r) {
  using detail::num;
  const auto& c = r.config;
  os << to_string(c.protocol) << ',' << c.T << ',' << c.M << ',' << c.K << ',' << num(c.lambda) << ',';
  if (r.aggregate && c.protocol == Protocol::signature)
    os << r.aggregate->L;
  else
    os << "NA";
  os << ',' << num(c.G_target) << ',' << num(c.p_d) << ',' << num(c.p_f) << ',' << c.n_frames << ','
     << r.replications;
  detail::metric(os, r.aggregate, &AggregateMetrics::goodput);
  detail::metric(os, r.aggregate, &AggregateMetrics::reliability);
  detail::metric(os, r.aggregate, &AggregateMetrics::latency_ms);
  detail::metric(os, r.aggregate, &AggregateMetrics::messages);
  if (r.aggregate)
    os << ',' << r.aggregate->false_positives_total << ',' << r.aggregate->collisions_total;
  else
    os << ",NA,NA";
  os << '\n';
}

}  // namespace sigra
