#pragma once

// LTE contention-based connection establishment baseline.
//
// Access (4 messages when it succeeds): preamble, RAR, RRC Connection
// Request (msg3), contention resolution (msg4). Then
//   lte_full: Authentication Request/Response, Security Mode
//             Command/Complete, RRC Connection Reconfiguration/Complete, data
//   lte_mtc:  RRC Connection Reconfiguration, Reconfiguration Complete + data
// A missed preamble costs 1 message and a delta_RAR wait; a msg3 collision
// costs 3 messages and a delta_CR wait. Either is followed by a uniform
// backoff in [0, W) and a new attempt, up to R attempts.

#include <algorithm>
#include <cstdint>
#include <map>
#include <vector>

#include "sigra/arrivals.hpp"
#include "sigra/scenario.hpp"

namespace sigra {

inline constexpr std::uint32_t kLteAccessMessages = 4;

inline std::uint32_t lte_post_access_messages(Protocol p) {
  switch (p) {
    case Protocol::lte_full: return 4 + 2 + 1;
    case Protocol::lte_mtc: return 2;
    case Protocol::signature: break;
  }
  throw ConfigError("not an LTE protocol");
}

// Sub-frames from the preamble RAO to msg3 and to msg4 on the success path.
inline constexpr std::int64_t kMsg3Offset = 2;
inline constexpr std::int64_t kMsg4Offset = 3;

inline AccessMetrics run_lte_sim(const ScenarioConfig& cfg) {
  cfg.validate();
  const std::uint32_t post = lte_post_access_messages(cfg.protocol);
  const std::uint32_t T = cfg.T;
  const std::uint32_t M = cfg.M;
  const std::int64_t rao_period = cfg.delta_RAO;
  const std::int64_t horizon = cfg.n_frames;  // sub-frames with arrivals
  const auto model = cfg.detection();

  Rng rng(cfg.seed);
  std::vector<std::uint8_t> busy(T, 0);
  std::vector<std::int64_t> arrival(T, 0);
  std::vector<std::int64_t> free_at(T, 0);
  std::vector<std::uint32_t> attempts(T, 0);
  std::vector<std::uint32_t> messages(T, 0);
  std::map<std::int64_t, std::vector<std::uint32_t>> calendar;  // RAO time -> devices attempting

  MetricsAccumulator acc;

  const auto next_rao_at_or_after = [&](std::int64_t t) { return (t + rao_period - 1) / rao_period * rao_period; };

  const auto finish = [&](std::uint32_t d, bool ok, std::int64_t when) {
    acc.complete(ok, double(when - arrival[d]) * cfg.t_s, messages[d]);
    busy[d] = 0;
    free_at[d] = when;
  };

  const auto retry_or_fail = [&](std::uint32_t d, std::int64_t known_at) {
    if (attempts[d] >= cfg.R) {
      finish(d, false, known_at);
      return;
    }
    const auto backoff = static_cast<std::int64_t>(unit_uniform(rng) * cfg.W);
    calendar[next_rao_at_or_after(known_at + backoff)].push_back(d);
  };

  std::vector<std::vector<std::uint32_t>> by_preamble(M + 1);
  for (std::int64_t t = 0; t < horizon || !calendar.empty(); ++t) {
    if (t % rao_period != 0) continue;

    if (auto it = calendar.find(t); it != calendar.end()) {
      auto contenders = std::move(it->second);
      calendar.erase(it);
      std::sort(contenders.begin(), contenders.end());
      for (auto& g : by_preamble) g.clear();
      for (auto d : contenders) {
        const auto m = 1 + static_cast<std::uint32_t>(unit_uniform(rng) * M);
        by_preamble[m].push_back(d);
        ++messages[d];
        ++attempts[d];
      }

      std::uint64_t grants = 0;
      std::uint64_t useful = 0;
      for (std::uint32_t m = 1; m <= M; ++m) {
        const auto& group = by_preamble[m];
        if (group.empty()) {
          // Phantom RAR: a grant nobody uses.
          if (bernoulli(rng, model.p_f)) {
            ++grants;
            ++acc.raw().false_positives;
          }
          continue;
        }
        if (!bernoulli(rng, model.p_d)) {
          for (auto d : group) retry_or_fail(d, t + cfg.delta_RAR);
          continue;
        }
        ++grants;
        for (auto d : group) messages[d] += 2;  // RAR + msg3
        if (group.size() == 1) {
          const auto d = group.front();
          messages[d] += 1 + post;
          ++useful;
          finish(d, true, t + kMsg4Offset);
          free_at[d] = t + kMsg4Offset + post;
        } else {
          ++acc.raw().collisions;
          for (auto d : group) retry_or_fail(d, t + kMsg3Offset + cfg.delta_CR);
        }
      }
      acc.contention_round(useful, grants - useful);
      ++acc.raw().frames_run;
    }

    if (t < horizon) {
      for (auto d : draw_arrivals(rng, T, cfg.lambda)) {
        if (!busy[d] && free_at[d] <= t) {
          busy[d] = 1;
          arrival[d] = t;
          attempts[d] = 0;
          messages[d] = 0;
          ++acc.raw().arrivals;
          calendar[next_rao_at_or_after(t + 1)].push_back(d);
        } else {
          ++acc.raw().appended_payloads;
        }
      }
    }
  }

  auto metrics = acc.finish();
  metrics.in_progress = 0;
  return metrics;
}

}  // namespace sigra
