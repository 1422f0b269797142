#pragma once

// Four-device, two-active worked example of iterative decoding on a clean
// channel (L=4, K=2, M=2). Devices are labelled s1..s4; s1 and s3 transmit.
//
//   s1 (3,1) (4,2)     s2 (1,2) (4,1)     s3 (1,1) (3,1)     s4 (1,1) (2,2)
//
// RAO 1 sees only preamble 1, so s2 is out. RAO 2 is silent: s4 is out and s3
// is left as the only explanation of (1,1). RAO 3 then carries only s1, which
// is the only candidate left. RAO 4 is never needed.

#include <array>
#include <random>
#include <vector>

#include "sigra/frame.hpp"

namespace sigra::demo {

inline CandidateRegistry example_registry() {
  const SignatureParams p{4, 2, 2};
  CandidateRegistry reg(p);
  reg.add(Signature({{3, 1}, {4, 2}}, p));
  reg.add(Signature({{1, 2}, {4, 1}}, p));
  reg.add(Signature({{1, 1}, {3, 1}}, p));
  reg.add(Signature({{1, 1}, {2, 2}}, p));
  return reg;
}

inline constexpr std::array<std::uint32_t, 2> kActive{0, 2};

struct DemoRun {
  FrameOutcome outcome;
  DecodeTrace trace;
};

inline DemoRun run_example() {
  const auto reg = example_registry();
  DemoRun r;
  Rng unused(0);  // noiseless channel draws nothing
  r.outcome = run_frame(reg, kActive, DetectionModel{}, unused, IterativeOptions{}, &r.trace);
  return r;
}

}  // namespace sigra::demo
