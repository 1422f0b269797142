#pragma once

// Base-station view of one RAO: OR-superposition of transmitted preambles
// with per-preamble missed detection and false alarm.

#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "sigra/observation.hpp"

namespace sigra {

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits, independent of the
// standard library's distribution implementations.
inline double unit_uniform(Rng& rng) { return double(rng() >> 11) * 0x1.0p-53; }

inline bool bernoulli(Rng& rng, double p) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return unit_uniform(rng) < p;
}

struct DetectionModel {
  double p_d = 1.0;  // activated preamble detected
  double p_f = 0.0;  // idle preamble falsely detected

  void validate() const {
    if (!(p_f >= 0.0 && p_f < p_d && p_d <= 1.0))
      throw std::invalid_argument("detection model requires 0 <= p_f < p_d <= 1");
  }

  bool noiseless() const { return p_d == 1.0 && p_f == 0.0; }
};

struct Transmission {
  std::uint32_t device = 0;
  std::uint32_t preamble = 0;  // 1-based
};

// One detection draw per preamble, regardless of how many devices sent it:
// the base station sees activity, not multiplicity.
inline PreambleSet observe_rao(std::span<const Transmission> transmissions, const DetectionModel& model,
                               std::uint32_t M, Rng& rng) {
  PreambleSet activated(M);
  for (const auto& tx : transmissions) activated.insert(tx.preamble);
  if (model.noiseless()) return activated;

  PreambleSet detected(M);
  for (std::uint32_t m = 1; m <= M; ++m) {
    const double p = activated.contains(m) ? model.p_d : model.p_f;
    if (bernoulli(rng, p)) detected.insert(m);
  }
  return detected;
}

}  // namespace sigra
