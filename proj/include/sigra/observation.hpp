#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace sigra {

// Set of detected preamble indices within one RAO, 1-based in [1, M].
class PreambleSet {
 public:
  PreambleSet() = default;
  explicit PreambleSet(std::uint32_t M) : M_(M), words_((M + 63) / 64, 0) {}

  std::uint32_t capacity() const { return M_; }

  void insert(std::uint32_t m) {
    check(m);
    words_[(m - 1) / 64] |= std::uint64_t{1} << ((m - 1) % 64);
  }

  bool contains(std::uint32_t m) const {
    if (m < 1 || m > M_) return false;
    return (words_[(m - 1) / 64] >> ((m - 1) % 64)) & 1u;
  }

  std::size_t size() const {
    std::size_t n = 0;
    for (auto w : words_) n += std::size_t(std::popcount(w));
    return n;
  }

  bool empty() const { return size() == 0; }

  std::vector<std::uint32_t> to_vector() const {
    std::vector<std::uint32_t> out;
    for (std::uint32_t m = 1; m <= M_; ++m)
      if (contains(m)) out.push_back(m);
    return out;
  }

  PreambleSet& operator|=(const PreambleSet& other) {
    if (other.M_ != M_) throw std::invalid_argument("preamble set size mismatch");
    for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
    return *this;
  }

  bool operator==(const PreambleSet&) const = default;

 private:
  void check(std::uint32_t m) const {
    if (m < 1 || m > M_) throw std::out_of_range("preamble index outside [1, M]");
  }

  std::uint32_t M_ = 0;
  std::vector<std::uint64_t> words_;
};

// Per-RAO detected preamble sets as seen by the base station; grows as RAOs
// arrive.
class FrameObservation {
 public:
  FrameObservation() = default;
  explicit FrameObservation(std::uint32_t M) : M_(M) {}
  FrameObservation(std::uint32_t M, std::uint32_t L) : M_(M), raos_(L, PreambleSet(M)) {}

  std::uint32_t M() const { return M_; }
  std::uint32_t raos() const { return static_cast<std::uint32_t>(raos_.size()); }

  // 1-based RAO index.
  const PreambleSet& rao(std::uint32_t i) const { return raos_.at(i - 1); }
  PreambleSet& rao(std::uint32_t i) { return raos_.at(i - 1); }

  void push(PreambleSet detected) {
    if (detected.capacity() != M_) throw std::invalid_argument("preamble set size mismatch");
    raos_.push_back(std::move(detected));
  }

  bool detected(std::uint32_t rao, std::uint32_t preamble) const {
    return rao >= 1 && rao <= raos_.size() && raos_[rao - 1].contains(preamble);
  }

  bool operator==(const FrameObservation&) const = default;

 private:
  std::uint32_t M_ = 0;
  std::vector<PreambleSet> raos_;
};

}  // namespace sigra
