#pragma once

// Base-station signature detection.
//
// decode_full applies the match rule to a complete frame. IterativeDecoder
// consumes the frame RAO by RAO: candidates contradicted by an observed RAO
// are eliminated, and a candidate that becomes the only possible explanation
// of a detected activation is declared active and told to stop transmitting.

#include <algorithm>
#include <cstdint>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "sigra/observation.hpp"
#include "sigra/signature.hpp"

namespace sigra {

// Signatures of all T devices for the current frame, as regenerated by the
// base station from each device's key and the broadcast RAND. Device ids are
// registry indices.
class CandidateRegistry {
 public:
  explicit CandidateRegistry(const SignatureParams& params, std::size_t devices = 0)
      : params_(params), slots_(devices * params.K) {
    params_.validate();
  }

  const SignatureParams& params() const { return params_; }
  std::size_t size() const { return slots_.size() / params_.K; }

  std::span<const Slot> signature(std::size_t device) const {
    return std::span<const Slot>(slots_).subspan(device * params_.K, params_.K);
  }

  std::span<Slot> mutable_signature(std::size_t device) {
    return std::span<Slot>(slots_).subspan(device * params_.K, params_.K);
  }

  void assign(std::size_t device, const Signature& sig) {
    Signature::check(sig.slots(), params_);
    std::copy(sig.slots().begin(), sig.slots().end(), mutable_signature(device).begin());
  }

  std::uint32_t add(const Signature& sig) {
    Signature::check(sig.slots(), params_);
    slots_.insert(slots_.end(), sig.slots().begin(), sig.slots().end());
    return static_cast<std::uint32_t>(size() - 1);
  }

  void resize(std::size_t devices) { slots_.resize(devices * params_.K); }

 private:
  SignatureParams params_;
  std::vector<Slot> slots_;
};

enum class DecodeEventKind : std::uint8_t {
  eliminated,
  decoded_active,
  stop_feedback_sent,
  false_positive_declared,
};

inline std::string_view to_string(DecodeEventKind k) {
  switch (k) {
    case DecodeEventKind::eliminated: return "eliminated";
    case DecodeEventKind::decoded_active: return "decoded_active";
    case DecodeEventKind::stop_feedback_sent: return "stop_feedback_sent";
    case DecodeEventKind::false_positive_declared: return "false_positive_declared";
  }
  return "unknown";
}

struct DecodeEvent {
  std::uint32_t rao = 0;
  DecodeEventKind kind = DecodeEventKind::eliminated;
  std::uint32_t device = 0;
  bool operator==(const DecodeEvent&) const = default;
};

using DecodeTrace = std::vector<DecodeEvent>;

// `first_id` shifts registry indices, e.g. 1 for 1-based device labels.
inline void write_trace_csv(std::ostream& os, const DecodeTrace& trace, bool header = true,
                            std::uint32_t first_id = 0) {
  if (header) os << "rao_index,event,device_id\n";
  for (const auto& e : trace) os << e.rao << ',' << to_string(e.kind) << ',' << e.device + first_id << '\n';
}

// Every device whose signature satisfies the match rule on the complete
// observation; may include false positives.
inline std::vector<std::uint32_t> decode_full(const FrameObservation& obs, const CandidateRegistry& registry) {
  if (obs.raos() < registry.params().L) throw std::invalid_argument("observation does not cover the frame");
  std::vector<std::uint32_t> active;
  for (std::size_t d = 0; d < registry.size(); ++d)
    if (matches(registry.signature(d), obs)) active.push_back(static_cast<std::uint32_t>(d));
  return active;
}

struct IterativeOptions {
  // Decoded devices stop transmitting from the next RAO. With feedback
  // disabled every device sends its whole signature.
  bool stop_feedback = true;
  // Detected slots of a candidate that must have been observed before it may
  // be declared as the sole explanation of an activation. 1 is pure peeling;
  // larger values trade early decoding for robustness to false alarms.
  std::uint32_t min_evidence = 1;
};

class IterativeDecoder {
 public:
  enum class Status : std::uint8_t { undecided, eliminated, decoded };

  // `truth`, when given, labels declarations of inactive devices as false
  // positives in the trace; it does not influence decoding.
  IterativeDecoder(const CandidateRegistry& registry, IterativeOptions options,
                   std::span<const std::uint8_t> truth = {}, DecodeTrace* trace = nullptr)
      : registry_(registry),
        options_(options),
        truth_(truth),
        trace_(trace),
        L_(registry.params().L),
        K_(registry.params().K),
        M_(registry.params().M),
        status_(registry.size(), Status::undecided),
        decoded_at_(registry.size(), 0),
        evidence_(registry.size(), 0),
        member_count_(registry.size(), 0),
        member_slots_(registry.size() * K_),
        explainers_(std::size_t(L_) * M_, 0),
        explainer_sum_(std::size_t(L_) * M_, 0),
        undecided_(registry.size()) {
    if (!truth_.empty() && truth_.size() != registry.size())
      throw std::invalid_argument("truth mask size differs from registry");
    build_rao_index();
  }

  // Consumes the next RAO's detected set. Returns devices declared during
  // this RAO (stop feedback recipients when feedback is enabled).
  const std::vector<std::uint32_t>& consume(const PreambleSet& detected) {
    if (rao_ >= L_) throw std::logic_error("frame already complete");
    if (detected.capacity() != M_) throw std::invalid_argument("preamble set size mismatch");
    ++rao_;
    granted_.clear();

    for (std::size_t k = rao_offset_[rao_ - 1]; k < rao_offset_[rao_]; ++k) {
      const auto [device, preamble] = rao_entries_[k];
      const Status st = status_[device];
      if (st == Status::eliminated) continue;
      if (st == Status::decoded) {
        // Without feedback a decoded device keeps sending and still explains
        // what it sends; it is never re-examined.
        if (!options_.stop_feedback && detected.contains(preamble)) join(device, preamble);
        continue;
      }
      if (detected.contains(preamble)) {
        ++evidence_[device];
        join(device, preamble);
      } else {
        eliminate(device);
      }
    }

    peel();
    return granted_;
  }

  // True once every candidate is decoded or eliminated, or all L RAOs are in.
  bool finished() const { return undecided_ == 0 || rao_ >= L_; }

  // Frame end: surviving undecided candidates satisfy the match rule on
  // everything observed and are declared active.
  std::vector<std::uint32_t> finish() {
    std::vector<std::uint32_t> late;
    for (std::uint32_t d = 0; d < status_.size(); ++d) {
      if (status_[d] != Status::undecided) continue;
      status_[d] = Status::decoded;
      decoded_at_[d] = rao_;
      declared_.push_back(d);
      late.push_back(d);
      record(rao_, declaration_kind(d), d);
    }
    undecided_ = 0;
    return late;
  }

  std::uint32_t raos_consumed() const { return rao_; }
  Status status(std::uint32_t device) const { return status_.at(device); }
  std::uint32_t decoded_at(std::uint32_t device) const { return decoded_at_.at(device); }
  const std::vector<std::uint32_t>& declared() const { return declared_; }

 private:
  static constexpr std::uint32_t kPending = 0xffffffffu;

  struct Entry {
    std::uint32_t device;
    std::uint32_t preamble;
  };

  void build_rao_index() {
    rao_offset_.assign(L_ + 1, 0);
    for (std::size_t d = 0; d < registry_.size(); ++d)
      for (const auto& s : registry_.signature(d)) ++rao_offset_[s.rao];
    for (std::uint32_t i = 1; i <= L_; ++i) rao_offset_[i] += rao_offset_[i - 1];
    rao_entries_.resize(rao_offset_[L_]);
    std::vector<std::size_t> fill(rao_offset_.begin(), rao_offset_.end() - 1);
    for (std::size_t d = 0; d < registry_.size(); ++d)
      for (const auto& s : registry_.signature(d))
        rao_entries_[fill[s.rao - 1]++] = {static_cast<std::uint32_t>(d), s.preamble};
  }

  std::size_t slot_id(std::uint32_t rao, std::uint32_t preamble) const {
    return std::size_t(rao - 1) * M_ + (preamble - 1);
  }

  void join(std::uint32_t device, std::uint32_t preamble) {
    const auto id = slot_id(rao_, preamble);
    ++explainers_[id];
    explainer_sum_[id] += device;
    member_slots_[std::size_t(device) * K_ + member_count_[device]++] = static_cast<std::uint32_t>(id);
    // Each RAO's fresh slots are candidates for peeling.
    if (explainers_[id] == 1) dirty_.push_back(static_cast<std::uint32_t>(id));
  }

  void eliminate(std::uint32_t device) {
    status_[device] = Status::eliminated;
    --undecided_;
    record(rao_, DecodeEventKind::eliminated, device);
    for (std::uint32_t k = 0; k < member_count_[device]; ++k) {
      const auto id = member_slots_[std::size_t(device) * K_ + k];
      --explainers_[id];
      explainer_sum_[id] -= device;
      // An empty explanation set means the activation was a false alarm (or
      // its sender was wrongly eliminated); the slot is simply dropped.
      if (explainers_[id] == 1) dirty_.push_back(id);
    }
  }

  // Declares sole explainers in ascending (RAO, preamble) order. Declaring
  // never shrinks an explanation set (a stopped device still explains what it
  // already sent), so one ordered pass reaches the fixpoint.
  void peel() {
    std::sort(dirty_.begin(), dirty_.end());
    dirty_.erase(std::unique(dirty_.begin(), dirty_.end()), dirty_.end());
    std::vector<std::uint32_t> keep;
    const std::uint32_t need = std::min(options_.min_evidence, K_);
    for (auto id : dirty_) {
      if (explainers_[id] != 1) continue;
      const auto device = static_cast<std::uint32_t>(explainer_sum_[id]);
      if (status_[device] != Status::undecided) continue;
      if (evidence_[device] < need) {
        keep.push_back(id);
        continue;
      }
      status_[device] = Status::decoded;
      decoded_at_[device] = rao_;
      --undecided_;
      declared_.push_back(device);
      granted_.push_back(device);
      record(rao_, declaration_kind(device), device);
      if (options_.stop_feedback) record(rao_, DecodeEventKind::stop_feedback_sent, device);
    }
    dirty_ = std::move(keep);
  }

  DecodeEventKind declaration_kind(std::uint32_t device) const {
    if (!truth_.empty() && !truth_[device]) return DecodeEventKind::false_positive_declared;
    return DecodeEventKind::decoded_active;
  }

  void record(std::uint32_t rao, DecodeEventKind kind, std::uint32_t device) {
    if (trace_) trace_->push_back({rao, kind, device});
  }

  const CandidateRegistry& registry_;
  IterativeOptions options_;
  std::span<const std::uint8_t> truth_;
  DecodeTrace* trace_;
  std::uint32_t L_, K_, M_;
  std::uint32_t rao_ = 0;

  std::vector<Status> status_;
  std::vector<std::uint32_t> decoded_at_;
  std::vector<std::uint32_t> evidence_;
  std::vector<std::uint32_t> member_count_;
  std::vector<std::uint32_t> member_slots_;
  std::vector<std::uint32_t> explainers_;
  std::vector<std::uint64_t> explainer_sum_;
  std::size_t undecided_;

  std::vector<std::size_t> rao_offset_;
  std::vector<Entry> rao_entries_;
  std::vector<std::uint32_t> dirty_;
  std::vector<std::uint32_t> granted_;
  std::vector<std::uint32_t> declared_;
};

struct IterativeResult {
  std::vector<std::uint32_t> declared;  // peeled and frame-end, in declaration order
  std::uint32_t raos_used = 0;
  DecodeTrace trace;
};

// Replays a recorded observation through the iterative decoder. The
// observation must already reflect stop feedback if it is enabled; use
// run_frame (frame.hpp) to let feedback shape the transmissions.
inline IterativeResult decode_iterative(const FrameObservation& obs, const CandidateRegistry& registry,
                                        IterativeOptions options = {},
                                        std::span<const std::uint8_t> truth = {}) {
  IterativeResult out;
  IterativeDecoder dec(registry, options, truth, &out.trace);
  for (std::uint32_t i = 1; i <= obs.raos() && !dec.finished(); ++i) dec.consume(obs.rao(i));
  dec.finish();
  out.declared = dec.declared();
  out.raos_used = dec.raos_consumed();
  return out;
}

}  // namespace sigra
