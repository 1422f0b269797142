#pragma once

// Authentication functions f1..f4 realised as one keyed PRF (SipHash-2-4,
// 128-bit key) with a one-byte domain-separation tag per function.
//
// Modelling assumption: f2 outputs are uniform over the 64-bit space. The
// signature-collision analysis in designer.hpp inherits this assumption.

#include <sodium.h>

#include <algorithm>
#include <array>
#include <compare>
#include <cstdint>
#include <random>
#include <stdexcept>

namespace sigra::auth {

using Block128 = std::array<std::uint8_t, 16>;

struct SecretKey {
  Block128 bytes{};
  auto operator<=>(const SecretKey&) const = default;
};

struct Rand128 {
  Block128 bytes{};
  auto operator<=>(const Rand128&) const = default;
};

// 48-bit sequence number.
class Sqn {
 public:
  static constexpr std::uint64_t kMax = (std::uint64_t{1} << 48) - 1;

  constexpr Sqn() = default;
  constexpr explicit Sqn(std::uint64_t v) : value_(v) {
    if (v > kMax) throw std::out_of_range("SQN exceeds 48 bits");
  }
  constexpr std::uint64_t value() const { return value_; }
  auto operator<=>(const Sqn&) const = default;

 private:
  std::uint64_t value_ = 0;
};

struct AuthChallenge {
  Rand128 rand;
  Sqn sqn;
  std::uint16_t amf = 0;
};

// f2 output (RES).
struct Res {
  std::uint64_t value = 0;
  auto operator<=>(const Res&) const = default;
};

// f1 output (MAC-A).
struct Mac {
  std::uint64_t value = 0;
  auto operator<=>(const Mac&) const = default;
};

struct CipherKey {
  Block128 bytes{};
  auto operator<=>(const CipherKey&) const = default;
};

struct IntegrityKey {
  Block128 bytes{};
  auto operator<=>(const IntegrityKey&) const = default;
};

struct AuthVector {
  Res res;
  Mac mac;
  CipherKey ck;
  IntegrityKey ik;
};

namespace detail {

enum class Tag : std::uint8_t { f1 = 0x01, f2 = 0x02, f3 = 0x03, f4 = 0x04 };

inline void ensure_sodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("libsodium initialisation failed");
}

inline std::uint64_t load_le64(const std::uint8_t* p) {
  std::uint64_t v = 0;
  for (int i = 7; i >= 0; --i) v = (v << 8) | p[i];
  return v;
}

template <std::size_t N>
std::array<std::uint8_t, N + 17> tagged(Tag tag, const Rand128& rand) {
  std::array<std::uint8_t, N + 17> msg{};
  msg[0] = static_cast<std::uint8_t>(tag);
  std::copy(rand.bytes.begin(), rand.bytes.end(), msg.begin() + 1);
  return msg;
}

template <std::size_t N>
std::uint64_t prf64(const SecretKey& sk, const std::array<std::uint8_t, N>& msg) {
  ensure_sodium();
  std::array<std::uint8_t, crypto_shorthash_siphash24_BYTES> out{};
  crypto_shorthash_siphash24(out.data(), msg.data(), msg.size(), sk.bytes.data());
  return load_le64(out.data());
}

template <std::size_t N>
Block128 prf128(const SecretKey& sk, const std::array<std::uint8_t, N>& msg) {
  ensure_sodium();
  Block128 out{};
  crypto_shorthash_siphashx24(out.data(), msg.data(), msg.size(), sk.bytes.data());
  return out;
}

}  // namespace detail

inline Res f2(const SecretKey& sk, const Rand128& rand) {
  return Res{detail::prf64(sk, detail::tagged<0>(detail::Tag::f2, rand))};
}

inline Mac f1(const SecretKey& sk, const AuthChallenge& ch) {
  auto msg = detail::tagged<8>(detail::Tag::f1, ch.rand);
  const std::uint64_t sqn = ch.sqn.value();
  for (int i = 0; i < 6; ++i) msg[17 + i] = static_cast<std::uint8_t>(sqn >> (8 * (5 - i)));
  msg[23] = static_cast<std::uint8_t>(ch.amf >> 8);
  msg[24] = static_cast<std::uint8_t>(ch.amf);
  return Mac{detail::prf64(sk, msg)};
}

inline CipherKey f3(const SecretKey& sk, const Rand128& rand) {
  return CipherKey{detail::prf128(sk, detail::tagged<0>(detail::Tag::f3, rand))};
}

inline IntegrityKey f4(const SecretKey& sk, const Rand128& rand) {
  return IntegrityKey{detail::prf128(sk, detail::tagged<0>(detail::Tag::f4, rand))};
}

inline AuthVector make_auth_vector(const SecretKey& sk, const AuthChallenge& ch) {
  return AuthVector{f2(sk, ch.rand), f1(sk, ch), f3(sk, ch.rand), f4(sk, ch.rand)};
}

// Device-side check of the network's MAC.
inline bool verify_network(const SecretKey& sk, const AuthChallenge& ch, Mac received) {
  return f1(sk, ch) == received;
}

template <std::uniform_random_bit_generator Rng>
Block128 random_block(Rng& rng) {
  static_assert(sizeof(typename Rng::result_type) == 8, "expects a 64-bit generator");
  Block128 b{};
  for (std::size_t i = 0; i < b.size(); i += 8) {
    std::uint64_t w = rng();
    for (std::size_t j = 0; j < 8; ++j) b[i + j] = static_cast<std::uint8_t>(w >> (8 * j));
  }
  return b;
}

}  // namespace sigra::auth
