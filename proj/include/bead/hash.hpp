#pragma once

#include <openssl/core_names.h>
#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <functional>
#include <memory>
#include <stdexcept>

#include "bead/bytes.hpp"

namespace bead {

inline constexpr std::size_t kSha256Bytes = 32;
using Sha256Digest = std::array<std::uint8_t, kSha256Bytes>;

inline Sha256Digest sha256(ByteView data) {
  Sha256Digest out{};
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), out.data(), &len, EVP_sha256(), nullptr) != 1 ||
      len != kSha256Bytes) {
    throw std::runtime_error("sha256: digest computation failed");
  }
  return out;
}

// HMAC-SHA256 keyed tag, 32 bytes.
inline Sha256Digest hmac_sha256(ByteView key, ByteView data) {
  struct MacDeleter {
    void operator()(EVP_MAC* m) const { EVP_MAC_free(m); }
    void operator()(EVP_MAC_CTX* c) const { EVP_MAC_CTX_free(c); }
  };
  static const std::unique_ptr<EVP_MAC, MacDeleter> mac{EVP_MAC_fetch(nullptr, "HMAC", nullptr)};
  if (!mac) {
    throw std::runtime_error("hmac_sha256: HMAC not available");
  }

  std::unique_ptr<EVP_MAC_CTX, MacDeleter> ctx{EVP_MAC_CTX_new(mac.get())};
  char digest_name[] = "SHA256";
  OSSL_PARAM params[] = {
      OSSL_PARAM_construct_utf8_string(OSSL_MAC_PARAM_DIGEST, digest_name, 0),
      OSSL_PARAM_construct_end(),
  };

  Sha256Digest out{};
  std::size_t len = 0;
  if (!ctx || EVP_MAC_init(ctx.get(), key.data(), key.size(), params) != 1 ||
      EVP_MAC_update(ctx.get(), data.data(), data.size()) != 1 ||
      EVP_MAC_final(ctx.get(), out.data(), &len, out.size()) != 1 || len != kSha256Bytes) {
    throw std::runtime_error("hmac_sha256: tag computation failed");
  }
  return out;
}

// A lambda-bit digest value. Lambda defaults to 256 and must be a positive
// multiple of 8 no wider than SHA-256.
class Digest {
public:
  Digest() = default;

  explicit Digest(Bytes bits) : bits_(std::move(bits)) {
    if (bits_.empty() || bits_.size() > kSha256Bytes) {
      throw std::invalid_argument("Digest: width must be 8..256 bits");
    }
  }

  static Digest truncated(const Sha256Digest& full, std::size_t lambda_bits) {
    if (lambda_bits == 0 || lambda_bits % 8 != 0 || lambda_bits > 8 * kSha256Bytes) {
      throw std::invalid_argument("Digest: lambda must be a multiple of 8 in [8, 256]");
    }
    return Digest(Bytes(full.begin(), full.begin() + lambda_bits / 8));
  }

  const Bytes& bytes() const { return bits_; }
  std::size_t size() const { return bits_.size(); }
  std::size_t bit_width() const { return bits_.size() * 8; }
  bool empty() const { return bits_.empty(); }
  std::string hex() const { return to_hex(bits_); }

  // Uniform 64-bit views into the digest, used for hash-table keys and for
  // deriving Bloom filter index pairs.
  std::uint64_t word(std::size_t i) const {
    std::uint64_t w = 0;
    for (std::size_t b = 0; b < 8; ++b) {
      w |= static_cast<std::uint64_t>(bits_[(8 * i + b) % bits_.size()]) << (8 * b);
    }
    return w;
  }

  friend bool operator==(const Digest&, const Digest&) = default;

private:
  Bytes bits_;
};

struct DigestHash {
  std::size_t operator()(const Digest& d) const {
    return d.empty() ? 0 : static_cast<std::size_t>(d.word(0));
  }
};

// Digest over an arbitrary canonical byte string, truncated to lambda bits.
inline Digest hash_digest(ByteView data, std::size_t lambda_bits = 256) {
  return Digest::truncated(sha256(data), lambda_bits);
}

}  // namespace bead
