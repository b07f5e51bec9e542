#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bead/bytes.hpp"
#include "bead/hash.hpp"
#include "bead/messages.hpp"
#include "bead/name.hpp"
#include "bead/rng.hpp"

namespace bead {

// Per-router MAC secret; tags are computed and verified only by the router
// that owns the key, so keys are never shared.
struct MarkingKey {
  Bytes key;
};

inline MarkingKey generate_marking_key(Rng& rng, std::size_t key_bytes = 32) {
  return MarkingKey{rng.bytes(key_bytes)};
}

// Canonical MAC input for one trace tuple: the content name, the tuple's own
// identity, and the serialized suffix it was stacked on. Covering the tuple's
// own fields means any byte flip in the tuple is caught by its owner;
// covering the suffix prevents splicing traces from different interests.
inline Bytes trace_mac_input(const Name& name, NodeId router_id, FaceId face_id,
                             std::span<const TraceTuple> suffix) {
  CanonicalWriter w;
  name.encode(w);
  w.put_u32(router_id);
  w.put_u16(face_id);
  w.put_u32(static_cast<std::uint32_t>(suffix.size()));
  for (const auto& t : suffix) {
    w.put_raw(t.serialize());
  }
  return w.take();
}

// Stacks (router_id, face_id, tag) onto the head of the interest's trace.
// The interest grows by exactly one 38-byte tuple.
inline void append_trace(Interest& interest, NodeId router_id, FaceId face_id,
                         const MarkingKey& key) {
  TraceTuple t;
  t.router_id = router_id;
  t.face_id = face_id;
  t.tag = hmac_sha256(key.key,
                      trace_mac_input(interest.name, router_id, face_id, interest.trace));
  interest.trace.insert(interest.trace.begin(), t);
}

enum class PopStatus { ok, no_trace, wrong_router, tag_mismatch };

struct PopResult {
  PopStatus status = PopStatus::no_trace;
  FaceId face_id = 0;
};

// Verifies the head tuple against this router's key; on success removes it
// and reports the face the original interest arrived on. Any failure leaves
// the erase untouched so the caller can fall through to the next strategy.
inline PopResult pop_and_verify(EraseMessage& erase, NodeId router_id, const MarkingKey& key) {
  if (erase.trace.empty()) return {PopStatus::no_trace, 0};
  const TraceTuple& head = erase.trace.front();
  if (head.router_id != router_id) return {PopStatus::wrong_router, 0};
  std::span<const TraceTuple> suffix{erase.trace.data() + 1, erase.trace.size() - 1};
  Sha256Digest want =
      hmac_sha256(key.key, trace_mac_input(erase.name, head.router_id, head.face_id, suffix));
  if (want != head.tag) return {PopStatus::tag_mismatch, 0};
  FaceId face = head.face_id;
  erase.trace.erase(erase.trace.begin());
  return {PopStatus::ok, face};
}

// Producer-side archive of interest traces, one list per distinct path seen.
class TraceStore {
 public:
  // Returns true when the trace was new for this name.
  bool record(const Name& name, const Trace& trace) {
    Entry& e = store_[name];
    std::uint64_t h = trace_fingerprint(trace);
    if (e.fingerprints.contains(h)) {
      for (const Trace& have : e.ordered) {
        if (have == trace) return false;
      }
    }
    e.fingerprints.insert(h);
    e.ordered.push_back(trace);
    return true;
  }

  const std::vector<Trace>* traces_for(const Name& name) const {
    auto it = store_.find(name);
    return it == store_.end() ? nullptr : &it->second.ordered;
  }

  std::size_t trace_count(const Name& name) const {
    const auto* t = traces_for(name);
    return t ? t->size() : 0;
  }

  std::size_t name_count() const { return store_.size(); }

  // One erase per recorded path, in the order the paths were first seen.
  // An empty result is the NoTraces signal: the caller should fall back to
  // a plain (un-traced) erase.
  std::vector<EraseMessage> erase_messages_for(const Name& name, const Digest& digest,
                                               const Bytes& token) const {
    std::vector<EraseMessage> out;
    const auto* traces = traces_for(name);
    if (!traces) return out;
    out.reserve(traces->size());
    for (const Trace& t : *traces) {
      out.push_back(EraseMessage{name, digest, token, t});
    }
    return out;
  }

  void forget(const Name& name) { store_.erase(name); }

 private:
  struct Entry {
    std::vector<Trace> ordered;
    std::unordered_set<std::uint64_t> fingerprints;
  };

  static std::uint64_t trace_fingerprint(const Trace& trace) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](std::uint8_t b) {
      h ^= b;
      h *= 0x100000001b3ull;
    };
    for (const auto& t : trace) {
      for (std::uint8_t b : t.serialize()) mix(b);
      mix(0xff);
    }
    return h;
  }

  std::unordered_map<Name, Entry, NameHash> store_;
};

// Size in bytes of the trace block a single aggregated erase would carry on a
// complete binary tree of height h: 2^h paths, h-1 tuples each.
inline std::uint64_t aggregated_trace_size(std::size_t h) {
  if (h < 1) throw std::invalid_argument("aggregated_trace_size: h must be >= 1");
  if (h > 57) throw std::invalid_argument("aggregated_trace_size: h too large");
  return (std::uint64_t{1} << h) * static_cast<std::uint64_t>(h - 1) * TraceTuple::kWireSize;
}

}  // namespace bead
