#pragma once

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <utility>

#include "bead/bytes.hpp"
#include "bead/hash.hpp"
#include "bead/messages.hpp"
#include "bead/name.hpp"
#include "bead/rng.hpp"

namespace bead {

// x_C: per-content secret the producer embeds (hashed) in the content at
// publication time and later reveals inside an erase message.
struct DeletionToken {
  Bytes secret;  // lambda/8 random bytes
};

inline DeletionToken generate_token(Rng& rng, std::size_t lambda_bits = 256) {
  if (lambda_bits < 8 || lambda_bits > 256 || lambda_bits % 8 != 0) {
    throw std::invalid_argument("token width must be 8..256 bits, byte aligned");
  }
  return DeletionToken{rng.bytes(lambda_bits / 8)};
}

// y_C = H(x_C), truncated to the token's own width.
inline Bytes token_digest_of(const DeletionToken& token) {
  Digest d = Digest::truncated(sha256(token.secret), token.secret.size() * 8);
  return d.bytes();
}

// A router verifies an erase against a cached content by hashing the revealed
// token and comparing with the digest the producer baked into the content.
inline bool verify_token(ByteView revealed_token, ByteView expected_token_digest) {
  if (expected_token_digest.empty()) return false;
  Digest d = Digest::truncated(sha256(revealed_token), expected_token_digest.size() * 8);
  if (d.bytes().size() != expected_token_digest.size()) return false;
  Bytes got = d.bytes();
  for (std::size_t i = 0; i < got.size(); ++i) {
    if (got[i] != expected_token_digest[i]) return false;
  }
  return true;
}

// Producer-side ledger of issued tokens, keyed by (name, content digest) so
// that distinct versions of the same name keep distinct tokens.
class TokenStore {
 public:
  void remember(const Name& name, const Digest& digest, DeletionToken token) {
    store_[key(name, digest)] = std::move(token);
  }

  const DeletionToken* find(const Name& name, const Digest& digest) const {
    auto it = store_.find(key(name, digest));
    return it == store_.end() ? nullptr : &it->second;
  }

  void forget(const Name& name, const Digest& digest) { store_.erase(key(name, digest)); }

  std::size_t size() const { return store_.size(); }

 private:
  static std::uint64_t key(const Name& name, const Digest& digest) {
    CanonicalWriter w;
    name.encode(w);
    w.put_bytes(digest.bytes());
    return hash_digest(w.bytes()).word(0);
  }

  std::unordered_map<std::uint64_t, DeletionToken> store_;
};

}  // namespace bead
