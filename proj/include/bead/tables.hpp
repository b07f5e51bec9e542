#pragma once

#include <cstdint>
#include <functional>
#include <list>
#include <set>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "bead/hash.hpp"
#include "bead/messages.hpp"
#include "bead/name.hpp"

namespace bead {

// FIB: hierarchical prefix -> outbound faces, longest-prefix-match lookup.
class FibTable {
 public:
  void add_route(const Name& prefix, FaceId face) { routes_[prefix].insert(face); }

  // Faces of the longest registered prefix of `name`, or nullptr.
  const std::set<FaceId>* lpm(const Name& name) const {
    for (std::size_t len = name.size(); len >= 1; --len) {
      auto it = routes_.find(name.prefix(len));
      if (it != routes_.end()) return &it->second;
    }
    return nullptr;
  }

  std::set<FaceId> lpm_faces(const Name& name) const {
    const auto* f = lpm(name);
    return f ? *f : std::set<FaceId>{};
  }

  const std::unordered_map<Name, std::set<FaceId>, NameHash>& routes() const { return routes_; }
  std::size_t size() const { return routes_.size(); }

 private:
  std::unordered_map<Name, std::set<FaceId>, NameHash> routes_;
};

struct PitEntry {
  std::set<FaceId> downstream;
  SimTime created_at = 0;
};

class PitTable {
 public:
  // Returns true when this created a fresh entry (interest must go upstream),
  // false when it collapsed into an existing one.
  bool add(const Name& name, FaceId face, SimTime now) {
    auto [it, fresh] = entries_.try_emplace(name);
    if (fresh) it->second.created_at = now;
    it->second.downstream.insert(face);
    return fresh;
  }

  const PitEntry* find(const Name& name) const {
    auto it = entries_.find(name);
    return it == entries_.end() ? nullptr : &it->second;
  }

  // Removes and returns the entry's downstream faces (empty if absent).
  std::set<FaceId> flush(const Name& name) {
    auto it = entries_.find(name);
    if (it == entries_.end()) return {};
    std::set<FaceId> faces = std::move(it->second.downstream);
    entries_.erase(it);
    return faces;
  }

  void drop(const Name& name) { entries_.erase(name); }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<Name, PitEntry, NameHash> entries_;
};

struct CacheEntry {
  ContentObject content;
  Digest digest;                     // content_digest, precomputed at insert
  std::set<FaceId> forwarded_faces;  // downstream faces this copy was sent on
  SimTime inserted_at = 0;
  SimTime last_access = 0;
};

// LRU content store. Expiry is enforced lazily at lookup and in bulk by
// sweep(). Every removal (eviction, expiry, explicit delete, replacement)
// passes through the eviction hook so the owner can record digests into
// per-interface histories in on_evict mode.
class ContentStore {
 public:
  using EvictHook = std::function<void(const CacheEntry&)>;

  explicit ContentStore(std::size_t capacity) : capacity_(capacity) {}

  void set_evict_hook(EvictHook hook) { on_evict_ = std::move(hook); }

  std::size_t capacity() const { return capacity_; }
  std::size_t size() const { return map_.size(); }

  // Cache hit for interest satisfaction: bumps recency, drops expired entries.
  CacheEntry* lookup(const Name& name, SimTime now) {
    auto it = map_.find(name);
    if (it == map_.end()) return nullptr;
    if (it->second.entry.content.expiry_time <= now) {
      remove(it);
      return nullptr;
    }
    it->second.entry.last_access = now;
    lru_.splice(lru_.begin(), lru_, it->second.order);
    return &it->second.entry;
  }

  // Non-bumping lookup used by erase handling.
  const CacheEntry* peek(const Name& name) const {
    auto it = map_.find(name);
    return it == map_.end() ? nullptr : &it->second.entry;
  }

  // Inserts (replacing any same-name entry), evicting LRU entries as needed.
  // No-op when capacity is zero: such a router does not cache.
  void insert(ContentObject content, Digest digest, std::set<FaceId> forwarded, SimTime now) {
    if (capacity_ == 0) return;
    auto it = map_.find(content.name);
    if (it != map_.end()) remove(it);
    while (map_.size() >= capacity_) {
      auto victim = map_.find(lru_.back());
      remove(victim);
    }
    lru_.push_front(content.name);
    Slot slot;
    slot.entry = CacheEntry{std::move(content), std::move(digest), std::move(forwarded), now, now};
    slot.order = lru_.begin();
    map_.emplace(lru_.front(), std::move(slot));
  }

  // Adds a face to an existing entry's forwarded set.
  void note_forwarded(const Name& name, FaceId face) {
    auto it = map_.find(name);
    if (it != map_.end()) it->second.entry.forwarded_faces.insert(face);
  }

  // Deletes the entry matching (name, digest); returns its pre-deletion state.
  std::optional<CacheEntry> erase_match(const Name& name, const Digest& digest) {
    auto it = map_.find(name);
    if (it == map_.end() || !(it->second.entry.digest == digest)) return std::nullopt;
    CacheEntry out = it->second.entry;
    remove(it);
    return out;
  }

  // Drops every expired entry; returns how many were dropped.
  std::size_t sweep(SimTime now) {
    std::size_t dropped = 0;
    for (auto it = map_.begin(); it != map_.end();) {
      if (it->second.entry.content.expiry_time <= now) {
        it = remove(it);
        ++dropped;
      } else {
        ++it;
      }
    }
    return dropped;
  }

 private:
  struct Slot {
    CacheEntry entry;
    std::list<Name>::iterator order;
  };

  using Map = std::unordered_map<Name, Slot, NameHash>;

  Map::iterator remove(Map::iterator it) {
    if (on_evict_) on_evict_(it->second.entry);
    lru_.erase(it->second.order);
    return map_.erase(it);
  }

  std::size_t capacity_;
  std::list<Name> lru_;  // front = most recently used
  Map map_;
  EvictHook on_evict_;
};

}  // namespace bead
