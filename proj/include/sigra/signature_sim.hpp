#pragma once

// Signature-based connection establishment, frame-gated:
//   message 0   broadcast of RAND, L, K (start of every frame)
//   preambles   up to K, stopped early by decoder feedback
//   RRC Connection Setup    carries f1(SK, RAND, SQN, AMF) for network auth
//   RRC Connection Setup Complete + data
// Devices arriving during a frame contend in the next one. A device whose
// signature is not declared by frame end fails that access and re-enters as a
// fresh arrival in the next frame.

#include <algorithm>
#include <cstdint>
#include <vector>

#include "sigra/arrivals.hpp"
#include "sigra/auth_kdf.hpp"
#include "sigra/designer.hpp"
#include "sigra/frame.hpp"
#include "sigra/scenario.hpp"

namespace sigra {

struct FrameTrace {
  std::uint64_t frame = 0;
  DecodeTrace events;
};

struct SimOptions {
  bool keep_traces = false;
  // Minimum observed slots before peeling may declare a candidate. 0 picks 1
  // on a noiseless channel and max(2, K-1) otherwise: with false alarms and
  // missed preambles, a sole explanation backed by one or two slots is too
  // often a phantom.
  std::uint32_t min_evidence = 0;
};

struct SignatureRun {
  AccessMetrics metrics;
  std::vector<FrameTrace> traces;
};

inline std::uint32_t effective_min_evidence(const SimOptions& opts, const DetectionModel& model, std::uint32_t K) {
  if (opts.min_evidence) return opts.min_evidence;
  if (model.noiseless()) return 1;
  return std::min(K, std::max(2u, K - 1));
}

// Contenders whose signature is also the signature of some other device.
inline std::uint64_t count_shared_signatures(const CandidateRegistry& registry,
                                             std::span<const std::uint32_t> contenders) {
  std::vector<std::pair<std::uint64_t, std::uint32_t>> keyed(registry.size());
  for (std::uint32_t d = 0; d < registry.size(); ++d) {
    std::uint64_t h = 0;
    for (const auto& s : registry.signature(d)) h = splitmix64(h ^ (std::uint64_t(s.rao) << 32 | s.preamble));
    keyed[d] = {h, d};
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<std::uint8_t> shared(registry.size(), 0);
  for (std::size_t i = 0; i < keyed.size();) {
    std::size_t j = i + 1;
    while (j < keyed.size() && keyed[j].first == keyed[i].first) ++j;
    for (std::size_t a = i; a < j; ++a)
      for (std::size_t b = a + 1; b < j; ++b) {
        const auto x = registry.signature(keyed[a].second);
        const auto y = registry.signature(keyed[b].second);
        if (std::equal(x.begin(), x.end(), y.begin())) shared[keyed[a].second] = shared[keyed[b].second] = 1;
      }
    i = j;
  }
  std::uint64_t n = 0;
  for (auto c : contenders) n += shared[c];
  return n;
}

inline design::DesignOutput design_for(const ScenarioConfig& cfg) {
  return design::frame_length({cfg.T, cfg.lambda, cfg.K, cfg.M, cfg.p_d, cfg.p_f, cfg.G_target});
}

inline SignatureRun run_signature_sim(const ScenarioConfig& cfg, const SimOptions& opts = {}) {
  cfg.validate();
  if (cfg.protocol != Protocol::signature) throw ConfigError("run_signature_sim needs protocol=signature");

  const auto design = design_for(cfg);
  const SignatureParams params{design.L, cfg.K, cfg.M};
  const auto model = cfg.detection();
  const IterativeOptions decoder_opts{true, effective_min_evidence(opts, model, cfg.K)};
  const std::uint32_t T = cfg.T;
  const std::uint32_t L = params.L;

  Rng rng(cfg.seed);
  std::vector<auth::SecretKey> keys(T);
  for (auto& k : keys) k.bytes = auth::random_block(rng);
  const auth::Sqn sqn(1);
  const std::uint16_t amf = 0x8000;

  enum class Phase : std::uint8_t { idle, waiting };
  std::vector<Phase> phase(T, Phase::idle);
  std::vector<std::int64_t> arrival(T, 0);
  std::vector<std::int64_t> free_at(T, 0);

  SignatureRun run;
  MetricsAccumulator acc;
  acc.raw().L = L;
  CandidateRegistry registry(params, T);
  std::vector<std::uint32_t> cohort;
  std::uint64_t activations = 0;

  const std::uint64_t frames = cfg.n_frames ? std::uint64_t(cfg.n_frames) + 1 : 0;  // +1 drains the last cohort
  for (std::uint64_t f = 0; f < frames; ++f) {
    const std::int64_t start = std::int64_t(f) * L;
    const auth::AuthChallenge challenge{auth::Rand128{auth::random_block(rng)}, sqn, amf};
    std::vector<std::uint32_t> next;

    if (!cohort.empty()) {
      for (std::uint32_t d = 0; d < T; ++d)
        derive_signature_into(auth::f2(keys[d], challenge.rand), params, registry.mutable_signature(d));

      acc.raw().collisions += count_shared_signatures(registry, cohort);

      DecodeTrace* trace = nullptr;
      if (opts.keep_traces) {
        run.traces.push_back({f, {}});
        trace = &run.traces.back().events;
      }
      const auto out = run_frame(registry, cohort, model, rng, decoder_opts, trace);
      activations += out.activations;
      acc.raw().false_positives += out.false_positives;
      acc.contention_round(out.true_declared, out.false_positives);

      for (std::size_t a = 0; a < cohort.size(); ++a) {
        const auto d = cohort[a];
        std::uint32_t messages = out.preambles_sent[a];
        if (out.granted_at[a]) {
          // RRC Connection Setup (MAC check) + Setup Complete with data.
          const auto mac = auth::f1(keys[d], challenge);
          if (!auth::verify_network(keys[d], challenge, mac)) ++acc.raw().auth_failures;
          messages += 2;
          const std::int64_t done = start + out.granted_at[a];
          acc.complete(true, double(done - arrival[d]) * cfg.t_s, messages);
          phase[d] = Phase::idle;
          free_at[d] = done;
        } else {
          const std::int64_t done = start + L;
          acc.complete(false, double(done - arrival[d]) * cfg.t_s, messages);
          arrival[d] = done;
          ++acc.raw().arrivals;
          next.push_back(d);
        }
      }
    }
    ++acc.raw().frames_run;

    if (f < cfg.n_frames) {
      for (std::uint32_t i = 0; i < L; ++i) {
        const std::int64_t t = start + i;
        for (auto d : draw_arrivals(rng, T, cfg.lambda)) {
          if (phase[d] == Phase::idle && free_at[d] <= t) {
            phase[d] = Phase::waiting;
            arrival[d] = t;
            ++acc.raw().arrivals;
            next.push_back(d);
          } else {
            ++acc.raw().appended_payloads;
          }
        }
      }
    }
    std::sort(next.begin(), next.end());
    cohort = std::move(next);
  }

  auto metrics = acc.finish();
  metrics.in_progress = cohort.size();
  metrics.mean_activations = metrics.frames_run ? double(activations) / double(metrics.frames_run) : 0.0;
  run.metrics = metrics;
  return run;
}

}  // namespace sigra
