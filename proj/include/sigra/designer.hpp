#pragma once

// Closed-form dimensioning of the signature frame and the associated
// reliability/security figures: idle-preamble probability, false-positive
// probability, expected goodput, frame length for a goodput target,
// signature collision probabilities and eavesdropper candidate counts.

#include <boost/multiprecision/cpp_int.hpp>

#include <algorithm>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace sigra::design {

class InfeasibleDesign : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct LoadModel {
  std::uint64_t T = 1;     // population
  double lambda = 1.0;     // mean arrivals per RAO
  double G_target = 0.99;  // goodput target

  void validate() const {
    if (T < 1) throw std::invalid_argument("population T must be >= 1");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be > 0");
    if (!(G_target > 0.0 && G_target <= 1.0)) throw std::invalid_argument("goodput target must be in (0, 1]");
  }

  double expected_arrivals(double L) const { return lambda * L; }
};

// Probability that a given preamble in a given RAO is not activated by any of
// the lambda*L active signatures. Without L, the large-frame limit.
inline double p_idle(double lambda, std::uint32_t K, std::uint32_t M, std::optional<double> L = std::nullopt) {
  if (!(lambda >= 0.0)) throw std::invalid_argument("lambda must be >= 0");
  if (M < 1) throw std::invalid_argument("M must be >= 1");
  if (!L) return std::exp(-lambda * K / M);
  if (!(*L > 0.0)) throw std::invalid_argument("L must be > 0");
  if (K > M * *L) throw std::invalid_argument("K exceeds M*L");
  return std::pow(1.0 - K / (*L * M), lambda * *L);
}

// Probability that all K preambles of an inactive signature are detected.
inline double p_false_alarm(double lambda, std::uint32_t K, std::uint32_t M, double p_d, double p_f) {
  if (!(p_d >= 0.0 && p_d <= 1.0 && p_f >= 0.0 && p_f <= 1.0))
    throw std::invalid_argument("detection probabilities must lie in [0, 1]");
  const double pi = p_idle(lambda, K, M);
  return std::pow(p_d + (p_f - p_d) * pi, double(K));
}

// lambda*L / (lambda*L + p_fa*(T - lambda*L)).
inline double expected_goodput(double lambda, double L, double T, double p_fa) {
  const double n = lambda * L;
  if (n > T) throw std::invalid_argument("expected arrivals lambda*L exceed population T");
  const double denom = n + p_fa * (T - n);
  if (denom <= 0.0) return 1.0;
  return n / denom;
}

// Frame length meeting the goodput target, before rounding:
// L = T * G * B / (lambda * (1 + G * (B - 1))), B = p_fa from the limit p_idle.
inline double raw_frame_length(std::uint64_t T, double lambda, std::uint32_t K, std::uint32_t M, double p_d,
                               double p_f, double G_target) {
  const double pfa = p_false_alarm(lambda, K, M, p_d, p_f);
  return pfa * G_target / (lambda * (1.0 + G_target * (pfa - 1.0))) * double(T);
}

struct CollisionProbs {
  double p_c1 = 0.0;  // two devices share an f2 output
  double p_c2 = 0.0;  // two devices share a signature
  double p_c = 0.0;   // either
};

// Birthday form 1 - exp(-T(T-1)/(2S)) for T balls in S equally likely bins.
inline double collision_birthday(std::uint64_t T, double S) {
  if (T < 2) return 0.0;
  const double pairs = 0.5 * double(T) * double(T - 1);
  return -std::expm1(-pairs / S);
}

// Exact 1 - T! C(S, T) S^-T = 1 - prod_{i<T} (1 - i/S), summed in log space.
inline double collision_exact(std::uint64_t T, double S) {
  if (T < 2) return 0.0;
  if (double(T) > S) return 1.0;
  if (T == 2) return 1.0 / S;
  double log_p = 0.0;
  for (std::uint64_t i = 1; i < T; ++i) log_p += std::log1p(-double(i) / S);
  return -std::expm1(log_p);
}

// Number of distinct signatures, C(L, K) * M^K.
inline double signature_space(std::uint32_t L, std::uint32_t K, std::uint32_t M) {
  if (K > L) throw std::invalid_argument("K exceeds L");
  const double log_choose = std::lgamma(L + 1.0) - std::lgamma(K + 1.0) - std::lgamma(L - K + 1.0);
  const double S = std::exp(log_choose + K * std::log(double(M)));
  // Small spaces are integers; undo lgamma rounding.
  return S < 0x1.0p52 ? std::round(S) : S;
}

// Above this space size the birthday form replaces the exact product.
inline constexpr double kBirthdaySwitch = 1e15;

inline double collision_in_space(std::uint64_t T, double S) {
  return S > kBirthdaySwitch ? collision_birthday(T, S) : collision_exact(T, S);
}

inline CollisionProbs collision_prob(std::uint64_t T, std::uint32_t L, std::uint32_t K, std::uint32_t M) {
  if (T < 2) throw std::invalid_argument("collision probability needs T >= 2");
  CollisionProbs out;
  out.p_c1 = collision_in_space(T, 0x1.0p64);
  out.p_c2 = collision_in_space(T, signature_space(L, K, M));
  out.p_c = out.p_c1 + (1.0 - out.p_c1) * out.p_c2;
  return out;
}

struct DesignInput {
  std::uint64_t T = 5000;
  double lambda = 1.0;
  std::uint32_t K = 4;
  std::uint32_t M = 54;
  double p_d = 0.99;
  double p_f = 1e-3;
  double G_target = 0.99;
};

struct DesignOutput {
  std::uint32_t L = 0;
  double L_raw = 0.0;
  double p_i = 0.0;
  double p_fa = 0.0;
  double E_G = 0.0;
  CollisionProbs collision;
  bool clamped = false;
};

// Rounds the raw frame length up and clamps it to [K, ceil(G*T/lambda)].
inline DesignOutput frame_length(const DesignInput& in) {
  LoadModel{in.T, in.lambda, in.G_target}.validate();
  if (in.K < 1 || in.M < 1) throw std::invalid_argument("K and M must be >= 1");
  if (!(in.G_target < 1.0)) throw std::invalid_argument("goodput target must be < 1 for dimensioning");
  if (!(in.p_f >= 0.0 && in.p_f < in.p_d && in.p_d <= 1.0))
    throw std::invalid_argument("detection model requires 0 <= p_f < p_d <= 1");

  const double upper = std::ceil(in.G_target * double(in.T) / in.lambda);
  if (upper < in.K) throw InfeasibleDesign("no frame length satisfies K <= L <= G*T/lambda");

  DesignOutput out;
  out.p_i = p_idle(in.lambda, in.K, in.M);
  out.p_fa = p_false_alarm(in.lambda, in.K, in.M, in.p_d, in.p_f);
  out.L_raw = raw_frame_length(in.T, in.lambda, in.K, in.M, in.p_d, in.p_f, in.G_target);

  double L = std::ceil(out.L_raw);
  if (L < in.K) {
    L = in.K;
    out.clamped = true;
  } else if (L > upper) {
    L = upper;
    out.clamped = true;
  }
  out.L = static_cast<std::uint32_t>(L);

  const double n = std::min(in.lambda * L, double(in.T));
  out.E_G = expected_goodput(in.lambda, n / in.lambda, double(in.T), out.p_fa);
  if (in.T >= 2) out.collision = collision_prob(in.T, out.L, in.K, in.M);
  return out;
}

using BigInt = boost::multiprecision::cpp_int;

inline BigInt binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

// Candidate signatures an eavesdropper sees when N devices expose all their
// K preambles: C(K*N, K).
inline BigInt attacker_candidates(std::uint64_t N, std::uint64_t K) {
  if (N < 1 || K < 1) throw std::invalid_argument("attacker metrics need N >= 1 and K >= 1");
  return binomial(K * N, K);
}

// Chance that a captured signature's RAND is broadcast again: 2^-128.
inline double replay_probability() { return std::ldexp(1.0, -128); }

}  // namespace sigra::design
