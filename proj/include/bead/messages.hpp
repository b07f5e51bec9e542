#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <variant>
#include <vector>

#include "bead/bytes.hpp"
#include "bead/hash.hpp"
#include "bead/name.hpp"

namespace bead {

// Simulated time in integer nanoseconds. Integer arithmetic keeps event
// ordering exact and runs reproducible.
using SimTime = std::int64_t;
inline constexpr SimTime kNeverExpires = std::numeric_limits<SimTime>::max();

inline constexpr SimTime seconds(double s) { return static_cast<SimTime>(s * 1e9); }
inline constexpr double to_seconds(SimTime t) { return static_cast<double>(t) * 1e-9; }

using NodeId = std::uint32_t;
using FaceId = std::uint16_t;

// One hop-sequence mark: the router that handled an interest, the face the
// interest arrived on, and a MAC tag binding the tuple to the name and the
// rest of the trace. Serialized size is exactly 38 bytes.
struct TraceTuple {
  NodeId router_id = 0;
  FaceId face_id = 0;
  Sha256Digest tag{};

  static constexpr std::size_t kWireSize = 4 + 2 + 32;

  std::array<std::uint8_t, kWireSize> serialize() const {
    std::array<std::uint8_t, kWireSize> out{};
    for (int i = 0; i < 4; ++i) {
      out[i] = static_cast<std::uint8_t>(router_id >> (8 * i));
    }
    out[4] = static_cast<std::uint8_t>(face_id);
    out[5] = static_cast<std::uint8_t>(face_id >> 8);
    for (std::size_t i = 0; i < tag.size(); ++i) {
      out[6 + i] = tag[i];
    }
    return out;
  }

  static TraceTuple deserialize(const std::array<std::uint8_t, kWireSize>& in) {
    TraceTuple t;
    for (int i = 0; i < 4; ++i) {
      t.router_id |= static_cast<NodeId>(in[i]) << (8 * i);
    }
    t.face_id = static_cast<FaceId>(in[4] | (in[5] << 8));
    for (std::size_t i = 0; i < t.tag.size(); ++i) {
      t.tag[i] = in[6 + i];
    }
    return t;
  }

  friend bool operator==(const TraceTuple&, const TraceTuple&) = default;
};

using Trace = std::vector<TraceTuple>;

struct Interest {
  Name name;
  Bytes payload;
  Trace trace;  // head-first: the most recent marking router sits at index 0
  bool can_erase = false;
};

struct ContentObject {
  Name name;
  Bytes payload;
  SimTime expiry_time = kNeverExpires;
  Bytes token_digest;  // y_C, lambda/8 bytes; present iff can_erase
  bool can_erase = false;
};

// E[N, d]: deletion request for content N with digest d, authenticated by the
// deletion token x_C whose hash the content carries.
struct EraseMessage {
  Name name;
  Digest digest;
  Bytes token;
  Trace trace;  // optional source route recovered from interest marking
};

// Minimal "no such content" reply.
struct Nack {
  Name name;
};

using Message = std::variant<Interest, ContentObject, EraseMessage, Nack>;

// Modeled per-type header sizes in bytes. The erase header carries the name,
// digest and token, hence the larger baseline. Acceptance numbers use ratios
// that are robust to these constants.
struct SizeConfig {
  std::size_t lambda_bits = 256;
  std::size_t interest_header = 32;
  std::size_t content_header = 64;
  std::size_t erase_header = 96;
  std::size_t nack_header = 32;
};

// d = H(C[N]) over the canonical serialization of (name, payload,
// expiry_time, token_digest), truncated to lambda bits.
inline Digest content_digest(const ContentObject& c, std::size_t lambda_bits = 256) {
  CanonicalWriter w;
  c.name.encode(w);
  w.put_bytes(c.payload);
  w.put_i64(c.expiry_time);
  w.put_bytes(c.token_digest);
  return hash_digest(w.bytes(), lambda_bits);
}

inline std::size_t trace_bytes(const Trace& t) { return TraceTuple::kWireSize * t.size(); }

inline std::size_t message_size_bytes(const Interest& m, const SizeConfig& sz = {}) {
  return sz.interest_header + m.payload.size() + trace_bytes(m.trace);
}

inline std::size_t message_size_bytes(const ContentObject& m, const SizeConfig& sz = {}) {
  return sz.content_header + m.payload.size();
}

inline std::size_t message_size_bytes(const EraseMessage& m, const SizeConfig& sz = {}) {
  return sz.erase_header + trace_bytes(m.trace);
}

inline std::size_t message_size_bytes(const Nack&, const SizeConfig& sz = {}) {
  return sz.nack_header;
}

inline std::size_t message_size_bytes(const Message& m, const SizeConfig& sz = {}) {
  return std::visit([&](const auto& v) { return message_size_bytes(v, sz); }, m);
}

enum class MessageClass { interest, data, erase, nack };

inline MessageClass message_class(const Message& m) {
  switch (m.index()) {
    case 0: return MessageClass::interest;
    case 1: return MessageClass::data;
    case 2: return MessageClass::erase;
    default: return MessageClass::nack;
  }
}

// Logical identity of a deletion: (name, digest, token). Every hop and every
// per-path copy of one producer-issued deletion shares this value.
inline std::uint64_t erase_identity(const EraseMessage& e) {
  CanonicalWriter w;
  e.name.encode(w);
  w.put_bytes(e.digest.bytes());
  w.put_bytes(e.token);
  return hash_digest(w.bytes()).word(0);
}

// Duplicate-suppression key: identity plus the current trace state. Distinct
// per-path traced copies stay distinct (sibling erases must both cross shared
// upstream routers), while a copy looping back unchanged is caught.
inline std::uint64_t erase_dedup_key(const EraseMessage& e) {
  CanonicalWriter w;
  e.name.encode(w);
  w.put_bytes(e.digest.bytes());
  w.put_bytes(e.token);
  w.put_u32(static_cast<std::uint32_t>(e.trace.size()));
  for (const auto& t : e.trace) {
    w.put_raw(t.serialize());
  }
  return hash_digest(w.bytes()).word(0);
}

}  // namespace bead
