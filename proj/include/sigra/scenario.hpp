#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>

#include "sigra/channel.hpp"

namespace sigra {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Protocol : std::uint8_t { signature, lte_full, lte_mtc };

inline std::string_view to_string(Protocol p) {
  switch (p) {
    case Protocol::signature: return "signature";
    case Protocol::lte_full: return "lte_full";
    case Protocol::lte_mtc: return "lte_mtc";
  }
  return "unknown";
}

inline Protocol parse_protocol(std::string_view s) {
  if (s == "signature") return Protocol::signature;
  if (s == "lte_full") return Protocol::lte_full;
  if (s == "lte_mtc") return Protocol::lte_mtc;
  throw ConfigError("unknown protocol '" + std::string(s) + "' (expected signature, lte_full or lte_mtc)");
}

// Times are in sub-frames unless suffixed _ms. Defaults are the evaluation
// settings: 1 ms sub-frames, 54 preambles, p_d 0.99, p_f 1e-3, W 20,
// RAR wait 10, contention-resolution wait 40, 10 attempts.
struct ScenarioConfig {
  std::uint32_t T = 5000;
  std::uint32_t M = 54;
  std::uint32_t K = 4;
  double lambda = 1.0;
  double G_target = 0.99;
  double p_d = 0.99;
  double p_f = 1e-3;
  double t_s = 1.0;  // ms per sub-frame
  std::uint32_t delta_RAO = 1;
  std::uint32_t delta_RAR = 10;
  std::uint32_t delta_CR = 40;
  std::uint32_t W = 20;
  std::uint32_t R = 10;
  // Signature frames for the signature protocol; sub-frames with arrivals for
  // the LTE baseline.
  std::uint32_t n_frames = 500;
  std::uint64_t seed = 1;
  Protocol protocol = Protocol::signature;

  DetectionModel detection() const { return {p_d, p_f}; }

  void validate() const {
    if (T < 1) throw ConfigError("T must be >= 1");
    if (M < 1) throw ConfigError("M must be >= 1");
    if (K < 1) throw ConfigError("K must be >= 1");
    if (!(lambda > 0.0)) throw ConfigError("lambda must be > 0");
    if (lambda > T) throw ConfigError("lambda cannot exceed T");
    if (!(G_target > 0.0 && G_target < 1.0)) throw ConfigError("G_target must lie in (0, 1)");
    if (!(p_f >= 0.0 && p_f < p_d && p_d <= 1.0)) throw ConfigError("requires 0 <= p_f < p_d <= 1");
    if (!(t_s > 0.0)) throw ConfigError("t_s must be > 0");
    if (delta_RAO < 1) throw ConfigError("delta_RAO must be >= 1");
    if (delta_RAR < 1) throw ConfigError("delta_RAR must be >= 1");
    if (delta_CR < 1) throw ConfigError("delta_CR must be >= 1");
    if (W < 1) throw ConfigError("W must be >= 1");
    if (R < 1) throw ConfigError("R must be >= 1");
  }
};

struct AccessMetrics {
  double goodput = 1.0;      // mean N/(N+P) per contention round with declarations
  double reliability = 1.0;  // completed / (completed + failed)
  double mean_latency_ms = 0.0;
  double mean_messages = 0.0;

  std::uint64_t arrivals = 0;  // access records opened
  std::uint64_t successes = 0;
  std::uint64_t failures = 0;
  std::uint64_t in_progress = 0;

  std::uint64_t false_positives = 0;  // phantom signatures / phantom RARs
  std::uint64_t collisions = 0;
  std::uint64_t frames_run = 0;
  std::uint64_t goodput_samples = 0;
  std::uint64_t appended_payloads = 0;
  std::uint64_t auth_failures = 0;

  std::uint32_t L = 0;  // signature frame length; 0 for LTE
  std::uint32_t max_messages = 0;  // largest per-access message count seen
  double mean_activations = 0.0;   // distinct preamble activations per frame
};

// Running sums behind AccessMetrics.
class MetricsAccumulator {
 public:
  void complete(bool success, double latency_ms, std::uint32_t messages) {
    (success ? m_.successes : m_.failures) += 1;
    latency_sum_ += latency_ms;
    message_sum_ += messages;
    m_.max_messages = std::max(m_.max_messages, messages);
  }

  void contention_round(std::uint64_t useful, std::uint64_t wasted) {
    if (useful + wasted == 0) return;
    goodput_sum_ += double(useful) / double(useful + wasted);
    ++m_.goodput_samples;
  }

  AccessMetrics& raw() { return m_; }

  AccessMetrics finish() const {
    AccessMetrics out = m_;
    const auto done = m_.successes + m_.failures;
    out.goodput = m_.goodput_samples ? goodput_sum_ / double(m_.goodput_samples) : 1.0;
    out.reliability = done ? double(m_.successes) / double(done) : 1.0;
    out.mean_latency_ms = done ? latency_sum_ / double(done) : 0.0;
    out.mean_messages = done ? message_sum_ / double(done) : 0.0;
    return out;
  }

 private:
  AccessMetrics m_;
  double goodput_sum_ = 0.0;
  double latency_sum_ = 0.0;
  double message_sum_ = 0.0;
};

}  // namespace sigra
