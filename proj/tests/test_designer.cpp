#include <gtest/gtest.h>

#include <boost/multiprecision/cpp_dec_float.hpp>

#include <cmath>

#include "sigra/channel.hpp"
#include "sigra/designer.hpp"

using namespace sigra;
using namespace sigra::design;
using Big = boost::multiprecision::cpp_dec_float_50;

TEST(Designer, IdleProbabilityLimit) {
  EXPECT_NEAR(p_idle(1.0, 4, 54), 0.92861, 1e-5);
  EXPECT_EQ(p_idle(1.0, 0, 54), 1.0);
  EXPECT_NEAR(p_idle(1.0, 4, 54, 1e6), p_idle(1.0, 4, 54), 1e-4);
}

TEST(Designer, IdleProbabilityMonteCarlo) {
  // lambda*L actives each pick K distinct RAOs and a uniform preamble per RAO;
  // the fraction of untouched (RAO, preamble) slots tracks the limit form.
  const std::uint32_t L = 2000, K = 4, M = 54;
  const double lambda = 1.0;
  Rng rng(12);
  const int frames = 20;
  double idle = 0;
  for (int f = 0; f < frames; ++f) {
    std::vector<std::uint8_t> hit(std::size_t(L) * M, 0);
    for (std::uint32_t a = 0; a < std::uint32_t(lambda * L); ++a) {
      std::vector<std::uint32_t> raos;
      while (raos.size() < K) {
        const auto r = std::uint32_t(rng() % L);
        if (std::find(raos.begin(), raos.end(), r) == raos.end()) raos.push_back(r);
      }
      for (auto r : raos) hit[std::size_t(r) * M + rng() % M] = 1;
    }
    idle += double(std::count(hit.begin(), hit.end(), 0)) / hit.size();
  }
  idle /= frames;
  const double n = double(frames) * L * M;
  const double q = p_idle(lambda, K, M);
  EXPECT_NEAR(idle, q, 3 * std::sqrt(q * (1 - q) / n) + 1e-4);
}

TEST(Designer, FalseAlarm) {
  EXPECT_NEAR(p_false_alarm(1.0, 4, 54, 1.0, 0.0), std::pow(1 - std::exp(-4.0 / 54), 4), 1e-15);
  EXPECT_NEAR(p_false_alarm(1.0, 4, 54, 1.0, 0.0), 2.597e-5, 0.002e-5);
  EXPECT_NEAR(p_false_alarm(3.0, 5, 54, 0.7, 0.7), std::pow(0.7, 5), 1e-15);
  // With the bracket held fixed, p_fa is a power of it and falls with K.
  double prev = 1.0;
  for (std::uint32_t K = 1; K <= 40; ++K) {
    const double v = p_false_alarm(0.5, K, 54, 0.6, 0.6);
    EXPECT_LT(v, prev);
    prev = v;
  }
  // At fixed load the bracket tends to p_d, so p_fa still vanishes for large K.
  EXPECT_LT(p_false_alarm(1.0, 2000, 54, 0.99, 1e-3), 1e-8);
}

TEST(Designer, FalseAlarmMonteCarloSmall) {
  // Noiseless, small instance with a long frame: inactive signatures fully
  // covered by lambda*L random actives.
  const std::uint32_t L = 400, K = 3, M = 6;
  const double lambda = 1.0;
  Rng rng(77);
  std::uint64_t covered = 0, tested = 0;
  for (int f = 0; f < 200; ++f) {
    std::vector<std::uint8_t> hit(std::size_t(L) * M, 0);
    auto draw = [&](auto&& use) {
      std::vector<std::uint32_t> raos;
      while (raos.size() < K) {
        const auto r = std::uint32_t(rng() % L);
        if (std::find(raos.begin(), raos.end(), r) == raos.end()) raos.push_back(r);
      }
      for (auto r : raos) use(std::size_t(r) * M + rng() % M);
    };
    for (std::uint32_t a = 0; a < L; ++a) draw([&](std::size_t i) { hit[i] = 1; });
    for (int s = 0; s < 500; ++s) {
      bool all = true;
      draw([&](std::size_t i) { all = all && hit[i]; });
      covered += all;
      ++tested;
    }
  }
  const double q = p_false_alarm(lambda, K, M, 1.0, 0.0);
  const double emp = double(covered) / tested;
  EXPECT_NEAR(emp, q, 3 * std::sqrt(q * (1 - q) / tested) + 2e-3) << "q " << q;
}

TEST(Designer, ExpectedGoodput) {
  EXPECT_EQ(expected_goodput(1.0, 13, 5000, 0.0), 1.0);
  EXPECT_EQ(expected_goodput(2.0, 50, 100, 0.3), 1.0);
  // 13 / (13 + 2.6e-5 * 4987)
  const Big n = 13, pfa = Big("2.6e-5"), T = 5000;
  const double oracle = static_cast<double>(n / (n + pfa * (T - n)));
  EXPECT_NEAR(expected_goodput(1.0, 13, 5000, 2.6e-5), oracle, 1e-12);
  EXPECT_NEAR(oracle, 0.9901, 1e-4);
  EXPECT_THROW(expected_goodput(10.0, 600, 5000, 1e-3), std::invalid_argument);
}

TEST(Designer, FrameLengthDefaults) {
  const auto out = frame_length(DesignInput{});
  // Independent evaluation in 50-digit arithmetic.
  const Big pi = exp(Big(-4) / 54);
  const Big B = pow(Big("0.99") + (Big("0.001") - Big("0.99")) * pi, 4);
  const Big G = Big("0.99");
  const Big raw = B * G / (1 * (1 + G * (B - 1))) * 5000;
  EXPECT_NEAR(out.L_raw, static_cast<double>(raw), 1e-9);
  EXPECT_NEAR(out.L_raw, 12.98, 0.01);
  EXPECT_EQ(out.L, 13u);
  EXPECT_FALSE(out.clamped);
  EXPECT_GE(out.E_G, 0.99);
  EXPECT_LE(out.L, std::ceil(0.99 * 5000 / 1.0));
}

TEST(Designer, FrameLengthClampsLow) {
  DesignInput in;
  in.lambda = 0.001;
  const auto out = frame_length(in);
  EXPECT_LT(out.L_raw, 4.0);
  EXPECT_EQ(out.L, 4u);
  EXPECT_TRUE(out.clamped);
}

TEST(Designer, FrameLengthInfeasible) {
  DesignInput in;
  in.T = 10;
  in.lambda = 10;
  EXPECT_THROW(frame_length(in), InfeasibleDesign);
}

TEST(Designer, FrameLengthInterval) {
  for (double lambda : {0.01, 0.1, 0.5, 1.0, 2.0, 5.0, 10.0, 50.0, 200.0}) {
    DesignInput in;
    in.lambda = lambda;
    const auto out = frame_length(in);
    EXPECT_GE(out.L, in.K);
    EXPECT_LE(out.L, std::ceil(in.G_target * in.T / lambda));
    if (!out.clamped) EXPECT_GE(out.E_G, in.G_target - 1e-12) << lambda;
  }
}

TEST(Designer, CollisionTwoDevices) {
  const double S = signature_space(13, 4, 54);
  EXPECT_EQ(S, 715.0 * 54 * 54 * 54 * 54);
  const auto c = collision_prob(2, 13, 4, 54);
  EXPECT_EQ(c.p_c2, 1.0 / S);
  EXPECT_EQ(collision_exact(2, S), 1.0 / S);
  EXPECT_EQ(collision_prob(2, 4, 4, 1).p_c2, 1.0);
  EXPECT_EQ(collision_prob(50, 4, 4, 1).p_c2, 1.0);
}

TEST(Designer, CollisionBirthdayAgreement) {
  const auto c = collision_prob(100, 13, 4, 54);
  EXPECT_NEAR(c.p_c1 / (100.0 * 99 / 2 / std::ldexp(1.0, 64)), 1.0, 1e-3);
  EXPECT_NEAR(c.p_c1, 2.68e-16, 0.01e-16);
  // exact product in 50 digits
  for (std::uint64_t T : {10ull, 100ull, 1000ull}) {
    const Big S = Big(1e12);
    Big keep = 1;
    for (std::uint64_t i = 1; i < T; ++i) keep *= 1 - Big(i) / S;
    const double oracle = static_cast<double>(1 - keep);
    EXPECT_NEAR(collision_exact(T, 1e12) / oracle, 1.0, 1e-9);
    EXPECT_NEAR(collision_birthday(T, 1e12) / oracle, 1.0, 1e-3);
  }
  EXPECT_NEAR(c.p_c, c.p_c1 + (1 - c.p_c1) * c.p_c2, 1e-18);
}

TEST(Designer, AttackerCandidates) {
  EXPECT_EQ(attacker_candidates(1, 4), 1);
  // Enumerate 4-subsets of 8 preambles.
  int count = 0;
  for (unsigned m = 0; m < 256; ++m) count += std::popcount(m) == 4;
  EXPECT_EQ(attacker_candidates(2, 4), count);
  EXPECT_EQ(attacker_candidates(2, 4), 70);
  EXPECT_EQ(attacker_candidates(100, 10).str(), binomial(1000, 10).str());
  EXPECT_EQ(replay_probability(), std::ldexp(1.0, -128));
}
