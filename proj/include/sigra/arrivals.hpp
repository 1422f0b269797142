#pragma once

#include <algorithm>
#include <cstdint>
#include <random>
#include <vector>

#include "sigra/channel.hpp"

namespace sigra {

// Devices that generate a packet in one RAO: each of the T devices
// independently with probability lambda/T, drawn as a Binomial count and a
// uniform subset. Returned in ascending id order.
inline std::vector<std::uint32_t> draw_arrivals(Rng& rng, std::uint32_t T, double lambda) {
  std::binomial_distribution<std::uint32_t> count_dist(T, std::min(1.0, lambda / T));
  const std::uint32_t k = count_dist(rng);
  std::vector<std::uint32_t> picked;
  picked.reserve(k);
  if (k * 2 > T) {
    // Dense draw: partial Fisher-Yates.
    std::vector<std::uint32_t> all(T);
    for (std::uint32_t i = 0; i < T; ++i) all[i] = i;
    for (std::uint32_t i = 0; i < k; ++i) {
      const auto j = i + static_cast<std::uint32_t>(unit_uniform(rng) * (T - i));
      std::swap(all[i], all[j]);
    }
    picked.assign(all.begin(), all.begin() + k);
  } else {
    while (picked.size() < k) {
      const auto d = static_cast<std::uint32_t>(unit_uniform(rng) * T);
      if (std::find(picked.begin(), picked.end(), d) == picked.end()) picked.push_back(d);
    }
  }
  std::sort(picked.begin(), picked.end());
  return picked;
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

}  // namespace sigra
