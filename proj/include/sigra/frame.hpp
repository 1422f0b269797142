#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "sigra/channel.hpp"
#include "sigra/decoder.hpp"

namespace sigra {

struct FrameOutcome {
  // Indexed like the `active` argument of run_frame.
  std::vector<std::uint32_t> preambles_sent;
  std::vector<std::uint32_t> granted_at;  // RAO of declaration, 0 if never declared

  std::vector<std::uint32_t> declared;  // all declared devices, in order
  std::uint32_t true_declared = 0;
  std::uint32_t false_positives = 0;
  std::uint32_t raos_used = 0;      // RAOs the decoder needed
  std::uint64_t activations = 0;    // distinct (RAO, preamble) slots sent
};

// Runs one signature frame: active devices send their slots RAO by RAO, the
// channel produces detections, the decoder consumes them, and declared
// devices stop from the following RAO when feedback is enabled.
inline FrameOutcome run_frame(const CandidateRegistry& registry, std::span<const std::uint32_t> active,
                              const DetectionModel& model, Rng& rng, IterativeOptions options = {},
                              DecodeTrace* trace = nullptr) {
  const auto& params = registry.params();
  FrameOutcome out;
  out.preambles_sent.assign(active.size(), 0);
  out.granted_at.assign(active.size(), 0);

  std::vector<std::uint8_t> truth(registry.size(), 0);
  std::vector<std::uint32_t> index_of(registry.size(), 0);
  for (std::size_t a = 0; a < active.size(); ++a) {
    truth[active[a]] = 1;
    index_of[active[a]] = static_cast<std::uint32_t>(a);
  }

  IterativeDecoder decoder(registry, options, truth, trace);
  std::vector<std::uint8_t> stopped(active.size(), 0);
  std::vector<std::uint32_t> cursor(active.size(), 0);
  std::vector<Transmission> tx;

  for (std::uint32_t rao = 1; rao <= params.L; ++rao) {
    tx.clear();
    for (std::size_t a = 0; a < active.size(); ++a) {
      if (stopped[a]) continue;
      const auto sig = registry.signature(active[a]);
      if (cursor[a] < sig.size() && sig[cursor[a]].rao == rao) {
        tx.push_back({active[a], sig[cursor[a]].preamble});
        ++out.preambles_sent[a];
        ++cursor[a];
      }
    }
    {
      PreambleSet sent(params.M);
      for (const auto& t : tx) sent.insert(t.preamble);
      out.activations += sent.size();
    }
    // Devices the decoder has already given up on (eliminated) keep sending:
    // they cannot tell they were missed. Their remaining preambles are counted
    // but no longer observed once the decoder is done.
    if (decoder.finished()) continue;

    const auto detected = observe_rao(tx, model, params.M, rng);
    for (auto d : decoder.consume(detected)) {
      if (truth[d] && options.stop_feedback) stopped[index_of[d]] = 1;
    }
  }
  decoder.finish();
  out.raos_used = decoder.raos_consumed();

  out.declared = decoder.declared();
  for (auto d : out.declared) {
    if (truth[d]) {
      ++out.true_declared;
      out.granted_at[index_of[d]] = decoder.decoded_at(d);
    } else {
      ++out.false_positives;
    }
  }
  return out;
}

}  // namespace sigra
