#pragma once

// Replicated runs over a list of scenarios with 95% confidence intervals.
// Runs are independent; a worker pool may execute them in any order, results
// are joined in configuration order.

#include <boost/math/distributions/students_t.hpp>

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "sigra/lte_sim.hpp"
#include "sigra/signature_sim.hpp"

namespace sigra {

struct MetricSummary {
  double mean = 0.0;
  double ci95 = 0.0;  // half-width; meaningless when n < 2
  std::size_t n = 0;

  bool has_ci() const { return n >= 2; }
  double lower() const { return mean - ci95; }
  double upper() const { return mean + ci95; }
};

inline MetricSummary summarize(std::span<const double> xs) {
  MetricSummary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / double(xs.size());
  if (xs.size() < 2) return s;
  double ss = 0.0;
  for (double x : xs) ss += (x - s.mean) * (x - s.mean);
  const double sd = std::sqrt(ss / double(xs.size() - 1));
  const boost::math::students_t dist(double(xs.size() - 1));
  s.ci95 = boost::math::quantile(boost::math::complement(dist, 0.025)) * sd / std::sqrt(double(xs.size()));
  return s;
}

struct AggregateMetrics {
  MetricSummary goodput;
  MetricSummary reliability;
  MetricSummary latency_ms;
  MetricSummary messages;
  std::uint64_t false_positives_total = 0;
  std::uint64_t collisions_total = 0;
  std::uint64_t arrivals_total = 0;
  std::uint32_t L = 0;
  std::uint32_t max_messages = 0;
};

inline AggregateMetrics aggregate(std::span<const AccessMetrics> runs) {
  AggregateMetrics a;
  std::vector<double> g, r, l, m;
  for (const auto& x : runs) {
    g.push_back(x.goodput);
    r.push_back(x.reliability);
    l.push_back(x.mean_latency_ms);
    m.push_back(x.mean_messages);
    a.false_positives_total += x.false_positives;
    a.collisions_total += x.collisions;
    a.arrivals_total += x.arrivals;
    a.L = x.L;
    a.max_messages = std::max(a.max_messages, x.max_messages);
  }
  a.goodput = summarize(g);
  a.reliability = summarize(r);
  a.latency_ms = summarize(l);
  a.messages = summarize(m);
  return a;
}

inline std::uint64_t replication_seed(std::uint64_t base, std::uint32_t replication) {
  return splitmix64(base ^ splitmix64(replication + 1));
}

struct RunOutput {
  AccessMetrics metrics;
  std::vector<FrameTrace> traces;
};

inline RunOutput run_scenario(const ScenarioConfig& cfg, const SimOptions& opts = {}) {
  if (cfg.protocol == Protocol::signature) {
    auto r = run_signature_sim(cfg, opts);
    return {r.metrics, std::move(r.traces)};
  }
  return {run_lte_sim(cfg), {}};
}

struct SweepResult {
  ScenarioConfig config;
  std::uint32_t replications = 0;
  std::vector<AccessMetrics> runs;
  std::optional<AggregateMetrics> aggregate;
  std::vector<FrameTrace> traces;  // replication 0, when requested
  std::string error;               // set when any replication failed
  bool infeasible = false;
};

struct SweepOptions {
  std::uint32_t replications = 1;
  unsigned workers = 0;  // 0: hardware concurrency
  SimOptions sim;
};

inline std::vector<SweepResult> sweep(std::span<const ScenarioConfig> configs, const SweepOptions& opts) {
  if (opts.replications < 1) throw ConfigError("replications must be >= 1");
  const std::size_t reps = opts.replications;
  const std::size_t jobs = configs.size() * reps;

  struct Slot {
    std::optional<RunOutput> out;
    std::string error;
    bool infeasible = false;
  };
  std::vector<Slot> slots(jobs);
  std::atomic<std::size_t> next{0};

  const auto work = [&] {
    for (std::size_t j = next++; j < jobs; j = next++) {
      const std::size_t c = j / reps;
      const auto r = static_cast<std::uint32_t>(j % reps);
      ScenarioConfig cfg = configs[c];
      cfg.seed = replication_seed(configs[c].seed, r);
      SimOptions sim = opts.sim;
      sim.keep_traces = sim.keep_traces && r == 0;
      try {
        slots[j].out = run_scenario(cfg, sim);
      } catch (const design::InfeasibleDesign& e) {
        slots[j].error = e.what();
        slots[j].infeasible = true;
      } catch (const std::exception& e) {
        slots[j].error = e.what();
      }
    }
  };

  unsigned workers = opts.workers ? opts.workers : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, std::max<std::size_t>(jobs, 1)));
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
  }

  std::vector<SweepResult> results(configs.size());
  for (std::size_t c = 0; c < configs.size(); ++c) {
    auto& res = results[c];
    res.config = configs[c];
    res.replications = opts.replications;
    for (std::size_t r = 0; r < reps; ++r) {
      auto& s = slots[c * reps + r];
      if (!s.out) {
        if (res.error.empty()) res.error = s.error;
        res.infeasible = res.infeasible || s.infeasible;
        continue;
      }
      res.runs.push_back(s.out->metrics);
      if (r == 0) res.traces = std::move(s.out->traces);
    }
    if (res.error.empty()) res.aggregate = aggregate(res.runs);
  }
  return results;
}

}  // namespace sigra
