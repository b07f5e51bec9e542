#include <catch2/catch_amalgamated.hpp>

#include <set>
#include <string>
#include <vector>

#include "bead/messages.hpp"
#include "bead/name.hpp"
#include "bead/rng.hpp"

using namespace bead;

namespace {

ContentObject sample_content() {
  ContentObject c;
  c.name = Name::parse("/prefix/A/17");
  c.payload = Bytes{1, 2, 3, 4, 5, 6, 7, 8};
  c.expiry_time = seconds(60.0);
  c.token_digest = Bytes(32, 0xab);
  c.can_erase = true;
  return c;
}

}  // namespace

TEST_CASE("name parse and uri round trip", "[messages]") {
  Name n = Name::parse("/prefix/A/17");
  REQUIRE(n.size() == 3);
  REQUIRE(n.at(0) == "prefix");
  REQUIRE(n.at(2) == "17");
  REQUIRE(n.to_uri() == "/prefix/A/17");
  REQUIRE(Name::parse(n.to_uri()) == n);

  REQUIRE_THROWS_AS(Name::parse(""), std::invalid_argument);
  REQUIRE_THROWS_AS(Name::parse("no-slash"), std::invalid_argument);
  REQUIRE_THROWS_AS(Name::parse("/a//b"), std::invalid_argument);
  REQUIRE_THROWS_AS(Name(std::vector<std::string>{}), std::invalid_argument);
}

TEST_CASE("name prefix relation is reflexive and transitive", "[messages]") {
  Rng rng(11);
  std::vector<Name> pool;
  const char* comps[] = {"a", "b", "c", "dd"};
  for (int i = 0; i < 100; ++i) {
    std::vector<std::string> parts;
    std::size_t depth = 1 + rng.uniform_u64(4);
    for (std::size_t d = 0; d < depth; ++d) {
      parts.push_back(comps[rng.uniform_u64(4)]);
    }
    pool.emplace_back(std::move(parts));
  }
  for (const Name& n : pool) {
    REQUIRE(n.is_prefix_of(n));
  }
  for (const Name& a : pool) {
    for (const Name& b : pool) {
      for (const Name& c : pool) {
        if (a.is_prefix_of(b) && b.is_prefix_of(c)) {
          REQUIRE(a.is_prefix_of(c));
        }
      }
    }
  }
  // prefix() slices agree with is_prefix_of.
  Name n = Name::parse("/x/y/z");
  REQUIRE(n.prefix(2) == Name::parse("/x/y"));
  REQUIRE(n.prefix(2).is_prefix_of(n));
  REQUIRE_FALSE(n.is_prefix_of(n.prefix(2)));
  REQUIRE_THROWS_AS(n.prefix(0), std::invalid_argument);
  REQUIRE_THROWS_AS(n.prefix(4), std::invalid_argument);
}

TEST_CASE("canonical writer framing", "[messages]") {
  CanonicalWriter w;
  w.put_u16(0x1234);
  w.put_u32(0xdeadbeef);
  w.put_string("ab");
  const Bytes& b = w.bytes();
  REQUIRE(b.size() == 2 + 4 + 4 + 2);
  REQUIRE(b[0] == 0x34);
  REQUIRE(b[1] == 0x12);
  REQUIRE(b[2] == 0xef);
  REQUIRE(b[5] == 0xde);
  REQUIRE(b[6] == 2);  // length prefix, little endian
  REQUIRE(b[10] == 'a');
  REQUIRE(b[11] == 'b');
}

TEST_CASE("trace tuple wire format is 38 bytes and round trips", "[messages]") {
  STATIC_REQUIRE(TraceTuple::kWireSize == 38);
  Rng rng(7);
  for (int i = 0; i < 200; ++i) {
    TraceTuple t;
    t.router_id = static_cast<NodeId>(rng.next_u64());
    t.face_id = static_cast<FaceId>(rng.next_u64());
    Bytes tag = rng.bytes(32);
    std::copy(tag.begin(), tag.end(), t.tag.begin());
    auto wire = t.serialize();
    REQUIRE(wire.size() == 38);
    REQUIRE(TraceTuple::deserialize(wire) == t);
  }
}

TEST_CASE("content digest is deterministic and position sensitive", "[messages]") {
  ContentObject c = sample_content();
  Digest d0 = content_digest(c);
  REQUIRE(d0 == content_digest(c));
  REQUIRE(d0.size() == 32);

  // Any single-byte change anywhere in the digested fields changes the value.
  Rng rng(3);
  int perturbations = 0;
  for (std::size_t i = 0; i < c.payload.size(); ++i) {
    ContentObject m = c;
    m.payload[i] ^= 0xff;
    REQUIRE_FALSE(content_digest(m) == d0);
    ++perturbations;
  }
  for (std::size_t i = 0; i < c.token_digest.size(); ++i) {
    ContentObject m = c;
    m.token_digest[i] ^= 0x01;
    REQUIRE_FALSE(content_digest(m) == d0);
    ++perturbations;
  }
  while (perturbations < 1000) {
    ContentObject m = c;
    switch (rng.uniform_u64(4)) {
      case 0: m.payload[rng.uniform_u64(m.payload.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform_u64(255)); break;
      case 1: m.token_digest[rng.uniform_u64(m.token_digest.size())] ^= static_cast<std::uint8_t>(1 + rng.uniform_u64(255)); break;
      case 2: m.expiry_time += static_cast<SimTime>(1 + rng.uniform_u64(1000)); break;
      default: m.name = m.name.appended("x"); break;
    }
    REQUIRE_FALSE(content_digest(m) == d0);
    ++perturbations;
  }

  // Distinct names with identical payloads stay distinct.
  ContentObject other = c;
  other.name = Name::parse("/prefix/A/18");
  REQUIRE_FALSE(content_digest(other) == d0);
}

TEST_CASE("content digest honours lambda truncation", "[messages]") {
  ContentObject c = sample_content();
  REQUIRE(content_digest(c, 64).size() == 8);
  REQUIRE(content_digest(c, 8).size() == 1);
  // Truncation is a prefix of the full digest.
  Digest full = content_digest(c, 256);
  Digest t64 = content_digest(c, 64);
  for (std::size_t i = 0; i < 8; ++i) {
    REQUIRE(t64.bytes()[i] == full.bytes()[i]);
  }
  REQUIRE_THROWS_AS(content_digest(c, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(content_digest(c, 12), std::invalid_argument);
  REQUIRE_THROWS_AS(content_digest(c, 264), std::invalid_argument);
}

TEST_CASE("message size arithmetic", "[messages]") {
  SizeConfig sz;
  Interest i;
  i.name = Name::parse("/prefix/A/0");
  REQUIRE(message_size_bytes(i, sz) == 32);

  // 16 marking hops grow an interest by exactly 608 bytes.
  Interest marked = i;
  marked.trace.resize(16);
  REQUIRE(message_size_bytes(marked, sz) - message_size_bytes(i, sz) == 608);
  REQUIRE(trace_bytes(marked.trace) == 16 * 38);

  ContentObject c = sample_content();
  REQUIRE(message_size_bytes(c, sz) == 64 + c.payload.size());

  EraseMessage e;
  e.name = i.name;
  e.digest = content_digest(c);
  e.token = Bytes(32, 1);
  REQUIRE(message_size_bytes(e, sz) == 96);
  e.trace.resize(3);
  REQUIRE(message_size_bytes(e, sz) == 96 + 3 * 38);

  REQUIRE(message_size_bytes(Nack{i.name}, sz) == 32);

  // The variant dispatch matches the per-type overloads.
  REQUIRE(message_size_bytes(Message{marked}, sz) == 32 + 608);
  REQUIRE(message_size_bytes(Message{c}, sz) == 64 + c.payload.size());
  REQUIRE(message_size_bytes(Message{e}, sz) == 96 + 114);
  REQUIRE(message_size_bytes(Message{Nack{i.name}}, sz) == 32);

  REQUIRE(message_class(Message{i}) == MessageClass::interest);
  REQUIRE(message_class(Message{c}) == MessageClass::data);
  REQUIRE(message_class(Message{e}) == MessageClass::erase);
  REQUIRE(message_class(Message{Nack{i.name}}) == MessageClass::nack);
}

TEST_CASE("erase identity ignores the trace, the dedup key does not", "[messages]") {
  ContentObject c = sample_content();
  EraseMessage a;
  a.name = c.name;
  a.digest = content_digest(c);
  a.token = Bytes(32, 9);

  EraseMessage b = a;
  b.trace.resize(2);
  b.trace[0].router_id = 5;
  EraseMessage c2 = a;
  c2.trace.resize(2);
  c2.trace[0].router_id = 6;

  REQUIRE(erase_identity(a) == erase_identity(b));
  REQUIRE(erase_identity(b) == erase_identity(c2));

  REQUIRE(erase_dedup_key(a) != erase_dedup_key(b));
  REQUIRE(erase_dedup_key(b) != erase_dedup_key(c2));
  REQUIRE(erase_dedup_key(b) == erase_dedup_key(b));

  // Different token => different deletion.
  EraseMessage other = a;
  other.token[0] ^= 1;
  REQUIRE(erase_identity(other) != erase_identity(a));
}

TEST_CASE("sim time conversions", "[messages]") {
  REQUIRE(seconds(1.0) == 1000000000);
  REQUIRE(seconds(0.25) == 250000000);
  REQUIRE(to_seconds(seconds(12.5)) == Catch::Approx(12.5));
}
