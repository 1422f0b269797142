#pragma once

// Access signatures: K preambles spread over a frame of L RAOs, at most one
// preamble per RAO, derived from a device's f2 output.

#include <sodium.h>

#include <algorithm>
#include <compare>
#include <cstdint>
#include <numeric>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "sigra/auth_kdf.hpp"
#include "sigra/observation.hpp"

namespace sigra {

struct SignatureParams {
  std::uint32_t L = 1;  // RAOs per signature frame
  std::uint32_t K = 1;  // preambles per signature
  std::uint32_t M = 1;  // preambles available per RAO

  void validate() const {
    if (K < 1) throw std::invalid_argument("signature needs K >= 1");
    if (M < 1) throw std::invalid_argument("signature needs M >= 1");
    if (L < K) throw std::invalid_argument("signature frame shorter than K (L < K)");
  }

  // Length of the dense form: one (M+1)-bit word per RAO.
  std::size_t dense_bits() const { return std::size_t{L} * (M + 1); }
};

// One activation: preamble `preamble` sent in RAO `rao`. Both 1-based.
struct Slot {
  std::uint32_t rao = 0;
  std::uint32_t preamble = 0;
  auto operator<=>(const Slot&) const = default;
};

class Signature {
 public:
  Signature() = default;

  // Canonicalises (sorts by RAO) and checks the slots against `params`.
  Signature(std::vector<Slot> slots, const SignatureParams& params) : slots_(std::move(slots)) {
    std::sort(slots_.begin(), slots_.end());
    check(slots_, params);
  }

  std::span<const Slot> slots() const { return slots_; }
  std::size_t size() const { return slots_.size(); }

  bool operator==(const Signature&) const = default;

  // "(rao,preamble);(rao,preamble);..."
  std::string to_string() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < slots_.size(); ++i) {
      if (i) os << ';';
      os << '(' << slots_[i].rao << ',' << slots_[i].preamble << ')';
    }
    return os.str();
  }

  static Signature parse(std::string_view text, const SignatureParams& params) {
    std::vector<Slot> slots;
    std::size_t pos = 0;
    while (pos < text.size()) {
      auto close = text.find(')', pos);
      if (text[pos] != '(' || close == std::string_view::npos)
        throw std::invalid_argument("malformed signature text");
      auto body = std::string(text.substr(pos + 1, close - pos - 1));
      auto comma = body.find(',');
      if (comma == std::string::npos) throw std::invalid_argument("malformed signature slot");
      slots.push_back({static_cast<std::uint32_t>(std::stoul(body.substr(0, comma))),
                       static_cast<std::uint32_t>(std::stoul(body.substr(comma + 1)))});
      pos = close + 1;
      if (pos < text.size()) {
        if (text[pos] != ';') throw std::invalid_argument("malformed signature separator");
        ++pos;
      }
    }
    return Signature(std::move(slots), params);
  }

  static void check(std::span<const Slot> slots, const SignatureParams& params) {
    if (slots.size() != params.K) throw std::invalid_argument("signature must have exactly K slots");
    for (std::size_t i = 0; i < slots.size(); ++i) {
      const auto& s = slots[i];
      if (s.rao < 1 || s.rao > params.L) throw std::invalid_argument("slot RAO outside [1, L]");
      if (s.preamble < 1 || s.preamble > params.M)
        throw std::invalid_argument("slot preamble outside [1, M]");
      if (i && slots[i - 1].rao >= s.rao)
        throw std::invalid_argument("signature RAOs must be distinct and ascending");
    }
  }

 private:
  std::vector<Slot> slots_;
};

// Binary form: L words of M+1 bits; bit m-1 of word i-1 marks preamble m in
// RAO i, bit M marks "no activation" in that RAO.
class DenseSignature {
 public:
  DenseSignature() = default;
  DenseSignature(std::vector<bool> bits, const SignatureParams& params) : bits_(std::move(bits)) {
    if (bits_.size() != params.dense_bits()) throw std::invalid_argument("dense signature length");
    for (std::uint32_t rao = 0; rao < params.L; ++rao) {
      const auto first = bits_.begin() + std::ptrdiff_t(rao) * (params.M + 1);
      if (std::count(first, first + params.M + 1, true) != 1)
        throw std::invalid_argument("each dense RAO block must have exactly one bit set");
    }
  }

  const std::vector<bool>& bits() const { return bits_; }
  std::size_t popcount() const { return std::size_t(std::count(bits_.begin(), bits_.end(), true)); }
  bool operator==(const DenseSignature&) const = default;

 private:
  std::vector<bool> bits_;
};

// Dense position of slot (i, m) is (i-1)(M+1) + m, 1-based.
inline DenseSignature to_dense(const Signature& sig, const SignatureParams& params) {
  std::vector<bool> bits(params.dense_bits(), false);
  for (std::uint32_t rao = 0; rao < params.L; ++rao) bits[std::size_t(rao) * (params.M + 1) + params.M] = true;
  for (const auto& s : sig.slots()) {
    const std::size_t block = std::size_t(s.rao - 1) * (params.M + 1);
    bits[block + params.M] = false;
    bits[block + s.preamble - 1] = true;
  }
  return DenseSignature(std::move(bits), params);
}

inline Signature from_dense(const DenseSignature& dense, const SignatureParams& params) {
  std::vector<Slot> slots;
  const auto& bits = dense.bits();
  for (std::uint32_t rao = 0; rao < params.L; ++rao) {
    const std::size_t block = std::size_t(rao) * (params.M + 1);
    for (std::uint32_t m = 0; m < params.M; ++m)
      if (bits[block + m]) slots.push_back({rao + 1, m + 1});
  }
  return Signature(std::move(slots), params);
}

namespace detail {

// Public hash of (RES, stage, j): SipHash-2-4 under a fixed stage key. Each j
// gives an independent index; double hashing (h1 + j*h2) was tried and makes
// preambles of different devices agree far too often for small M.
inline std::uint64_t index_hash(auth::Res res, std::uint8_t stage, std::uint64_t j) {
  auth::detail::ensure_sodium();
  std::array<std::uint8_t, crypto_shorthash_siphash24_KEYBYTES> key{};
  key.fill(0x5a);
  key[0] = stage;
  std::array<std::uint8_t, 16> msg{};
  for (std::size_t i = 0; i < 8; ++i) {
    msg[i] = static_cast<std::uint8_t>(res.value >> (8 * i));
    msg[8 + i] = static_cast<std::uint8_t>(j >> (8 * i));
  }
  std::array<std::uint8_t, crypto_shorthash_siphash24_BYTES> out{};
  crypto_shorthash_siphash24(out.data(), msg.data(), msg.size(), key.data());
  return auth::detail::load_le64(out.data());
}

}  // namespace detail

// Writes the K slots of the signature for `res` into `out`, sorted by RAO.
// Stage 1 (a_j): probe j = 0, 1, ... and keep the first K distinct RAOs.
// Stage 2 (b_j): the j-th selected RAO gets preamble b_j(res).
inline void derive_signature_into(auth::Res res, const SignatureParams& params, std::span<Slot> out) {
  const std::uint64_t L = params.L;
  const std::uint64_t M = params.M;
  std::uint32_t chosen = 0;
  for (std::uint64_t probe = 0; chosen < params.K; ++probe) {
    const auto rao = static_cast<std::uint32_t>(detail::index_hash(res, 'a', probe) % L + 1);
    bool seen = false;
    for (std::uint32_t i = 0; i < chosen; ++i) seen = seen || out[i].rao == rao;
    if (seen) continue;
    out[chosen] = {rao, static_cast<std::uint32_t>(detail::index_hash(res, 'b', chosen) % M + 1)};
    ++chosen;
  }
  std::sort(out.begin(), out.begin() + params.K);
}

inline Signature derive_signature(auth::Res res, const SignatureParams& params) {
  params.validate();
  std::vector<Slot> slots(params.K);
  derive_signature_into(res, params, slots);
  return Signature(std::move(slots), params);
}

// Bitwise-AND match rule restricted to preamble bits: every slot of `sig`
// must be detected. Absence bits carry no evidence.
inline bool matches(std::span<const Slot> sig, const FrameObservation& obs) {
  return std::all_of(sig.begin(), sig.end(),
                     [&](const Slot& s) { return obs.detected(s.rao, s.preamble); });
}

inline bool matches(const Signature& sig, const FrameObservation& obs) { return matches(sig.slots(), obs); }

}  // namespace sigra
