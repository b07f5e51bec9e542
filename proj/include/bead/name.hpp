#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "bead/bytes.hpp"

namespace bead {

// Hierarchical content name: an ordered list of non-empty byte-string
// components, e.g. /prefix/A/17. Names are the routing key for interests,
// content objects and erase messages.
class Name {
public:
  Name() = default;

  explicit Name(std::vector<std::string> components) : components_(std::move(components)) {
    validate();
  }

  // Parses a URI-like form: "/a/b/c". A leading '/' is required.
  static Name parse(const std::string& uri) {
    if (uri.empty() || uri[0] != '/') {
      throw std::invalid_argument("Name: URI must start with '/': " + uri);
    }
    std::vector<std::string> parts;
    std::string cur;
    for (std::size_t i = 1; i <= uri.size(); ++i) {
      if (i == uri.size() || uri[i] == '/') {
        parts.push_back(cur);
        cur.clear();
      } else {
        cur.push_back(uri[i]);
      }
    }
    return Name(std::move(parts));
  }

  std::string to_uri() const {
    std::string out;
    for (const auto& c : components_) {
      out += '/';
      out += c;
    }
    return out;
  }

  const std::vector<std::string>& components() const { return components_; }
  std::size_t size() const { return components_.size(); }
  const std::string& at(std::size_t i) const { return components_.at(i); }

  // P is a prefix of N iff P's components equal N's first |P| components.
  // The relation is reflexive.
  bool is_prefix_of(const Name& other) const {
    if (components_.size() > other.components_.size()) {
      return false;
    }
    for (std::size_t i = 0; i < components_.size(); ++i) {
      if (components_[i] != other.components_[i]) {
        return false;
      }
    }
    return true;
  }

  Name prefix(std::size_t n) const {
    if (n == 0 || n > components_.size()) {
      throw std::invalid_argument("Name::prefix: invalid length");
    }
    return Name(std::vector<std::string>(components_.begin(), components_.begin() + n));
  }

  Name appended(std::string component) const {
    auto parts = components_;
    parts.push_back(std::move(component));
    return Name(std::move(parts));
  }

  void encode(class CanonicalWriter& w) const;

  friend bool operator==(const Name&, const Name&) = default;
  friend auto operator<=>(const Name& a, const Name& b) { return a.components_ <=> b.components_; }

private:
  void validate() const {
    if (components_.empty()) {
      throw std::invalid_argument("Name: at least one component required");
    }
    for (const auto& c : components_) {
      if (c.empty()) {
        throw std::invalid_argument("Name: components must be non-empty");
      }
    }
  }

  std::vector<std::string> components_;
};

inline void Name::encode(CanonicalWriter& w) const {
  w.put_u32(static_cast<std::uint32_t>(components_.size()));
  for (const auto& c : components_) {
    w.put_string(c);
  }
}

struct NameHash {
  std::size_t operator()(const Name& n) const {
    // FNV-1a over components with a separator byte.
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](std::uint8_t b) {
      h ^= b;
      h *= 1099511628211ull;
    };
    for (const auto& c : n.components()) {
      for (char ch : c) {
        mix(static_cast<std::uint8_t>(ch));
      }
      mix(0xff);
    }
    return static_cast<std::size_t>(h);
  }
};

}  // namespace bead
