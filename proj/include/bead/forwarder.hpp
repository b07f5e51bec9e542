#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_set>
#include <utility>
#include <vector>

#include "bead/auth.hpp"
#include "bead/histories.hpp"
#include "bead/marking.hpp"
#include "bead/messages.hpp"
#include "bead/tables.hpp"

namespace bead {

// Reserved face connecting a node's forwarding engine to its local agent
// (consumer or producer application).
inline constexpr FaceId kLocalFace = 0xFFFF;

enum class FloodFallback { flood, drop };

// When a forwarded content's digest enters the per-interface history:
// at forwarding time (default; required for non-caching routers) or when the
// cached copy leaves the store.
enum class HistoryInsert { on_forward, on_evict };

struct RouterConfig {
  std::size_t cache_capacity = 0;  // entries; 0 disables caching
  HistoryConfig history;           // per-interface history template
  bool marking_enabled = false;
  FloodFallback flood_fallback = FloodFallback::drop;
  // Compatibility mode: treat every message as erasable even without the
  // explicit flag. When false, unmarked content is neither traced nor
  // recorded in histories.
  bool assume_erasable = true;
  HistoryInsert history_insert = HistoryInsert::on_forward;
  SizeConfig sizes;
};

struct Emission {
  FaceId face;
  Message msg;
};

enum class EraseStrategy { duplicate, marking, cache_faces, history, flood, drop };

struct EraseOutcome {
  bool deleted = false;
  bool auth_failure = false;
  EraseStrategy strategy = EraseStrategy::drop;
  std::vector<Emission> emissions;
};

struct RouterCounters {
  std::uint64_t interests_in = 0;
  std::uint64_t content_in = 0;
  std::uint64_t erases_in = 0;
  std::uint64_t nacks_in = 0;
  std::uint64_t cache_hits = 0;
  std::uint64_t collapsed_interests = 0;
  std::uint64_t no_route_drops = 0;
  std::uint64_t unsolicited_drops = 0;
  std::uint64_t deletions = 0;
  std::uint64_t auth_failures = 0;
  std::uint64_t duplicate_erases = 0;
  std::uint64_t erases_marked_routed = 0;
  std::uint64_t erases_cache_routed = 0;
  std::uint64_t erases_history_routed = 0;
  std::uint64_t erases_flooded = 0;
  std::uint64_t erases_dropped = 0;
};

// One node's forwarding engine: CS/PIT/FIB plus the erase-handling strategies.
class Router {
 public:
  Router(NodeId id, RouterConfig cfg, std::vector<FaceId> faces, MarkingKey key)
      : id_(id), cfg_(std::move(cfg)), faces_(std::move(faces)), key_(std::move(key)),
        cs_(cfg_.cache_capacity) {
    std::sort(faces_.begin(), faces_.end());
    faces_.erase(std::unique(faces_.begin(), faces_.end()), faces_.end());
    for (FaceId f : faces_) {
      histories_.emplace(f, make_history(cfg_.history));
    }
    if (cfg_.history_insert == HistoryInsert::on_evict) {
      cs_.set_evict_hook([this](const CacheEntry& e) {
        if (erasable(e.content)) {
          for (FaceId f : e.forwarded_faces) record_history(f, e.digest, e.last_access);
        }
      });
    }
  }

  NodeId id() const { return id_; }
  const RouterConfig& config() const { return cfg_; }
  const std::vector<FaceId>& faces() const { return faces_; }
  FibTable& fib() { return fib_; }
  const FibTable& fib() const { return fib_; }
  ContentStore& cs() { return cs_; }
  const ContentStore& cs() const { return cs_; }
  const PitTable& pit() const { return pit_; }
  const RouterCounters& counters() const { return counters_; }
  const MarkingKey& marking_key() const { return key_; }

  ForwarderHistory* history(FaceId face) {
    auto it = histories_.find(face);
    return it == histories_.end() ? nullptr : it->second.get();
  }

  std::vector<Emission> on_interest(Interest interest, FaceId arrival, SimTime now) {
    ++counters_.interests_in;
    std::vector<Emission> out;

    if (CacheEntry* hit = cs_.lookup(interest.name, now)) {
      ++counters_.cache_hits;
      hit->forwarded_faces.insert(arrival);
      if (cfg_.history_insert == HistoryInsert::on_forward && erasable(hit->content)) {
        record_history(arrival, hit->digest, now);
      }
      out.push_back(Emission{arrival, hit->content});
      return out;
    }

    if (pit_.find(interest.name)) {
      pit_.add(interest.name, arrival, now);
      ++counters_.collapsed_interests;
      return out;
    }

    std::set<FaceId> next = fib_.lpm_faces(interest.name);
    next.erase(arrival);
    if (next.empty()) {
      ++counters_.no_route_drops;
      out.push_back(Emission{arrival, Nack{interest.name}});
      return out;
    }

    pit_.add(interest.name, arrival, now);
    if (cfg_.marking_enabled && erasable(interest)) {
      append_trace(interest, id_, arrival, key_);
    }
    for (FaceId f : next) {
      out.push_back(Emission{f, interest});
    }
    return out;
  }

  std::vector<Emission> on_content(ContentObject content, FaceId /*arrival*/, SimTime now) {
    ++counters_.content_in;
    std::vector<Emission> out;

    std::set<FaceId> downstream = pit_.flush(content.name);
    if (downstream.empty()) {
      ++counters_.unsolicited_drops;
      return out;
    }

    Digest digest = content_digest(content, cfg_.sizes.lambda_bits);
    if (cfg_.history_insert == HistoryInsert::on_forward && erasable(content)) {
      for (FaceId f : downstream) record_history(f, digest, now);
    }
    for (FaceId f : downstream) {
      out.push_back(Emission{f, content});
    }
    cs_.insert(std::move(content), std::move(digest), downstream, now);
    return out;
  }

  // Algorithm "erase-Flood": forward on every face outside the FIB's
  // longest-prefix-match set for the name; the arrival face is also excluded
  // to avoid trivial two-node cycles. Missing FIB entry = empty face set.
  std::vector<Emission> flood_erase(const EraseMessage& erase, FaceId arrival) const {
    std::set<FaceId> fib_faces = fib_.lpm_faces(erase.name);
    std::vector<Emission> out;
    for (FaceId f : faces_) {
      if (f == arrival || fib_faces.contains(f)) continue;
      out.push_back(Emission{f, erase});
    }
    return out;
  }

  EraseOutcome on_erase(EraseMessage erase, FaceId arrival, SimTime /*now*/) {
    ++counters_.erases_in;
    EraseOutcome outcome;

    std::uint64_t key = erase_dedup_key(erase);
    if (!seen_erases_.insert(key).second) {
      ++counters_.duplicate_erases;
      outcome.strategy = EraseStrategy::duplicate;
      return outcome;
    }

    // Authenticate against the cached copy, if any. A bad token kills the
    // erase outright; absence of a cached copy just means nothing to delete.
    std::optional<CacheEntry> deleted_entry;
    if (const CacheEntry* cached = cs_.peek(erase.name)) {
      if (cached->digest == erase.digest) {
        if (!verify_token(erase.token, cached->content.token_digest)) {
          ++counters_.auth_failures;
          outcome.auth_failure = true;
          outcome.strategy = EraseStrategy::drop;
          return outcome;
        }
        deleted_entry = cs_.erase_match(erase.name, erase.digest);
        outcome.deleted = true;
        ++counters_.deletions;
      }
    }

    route_erase(std::move(erase), arrival, deleted_entry, outcome);
    return outcome;
  }

  std::vector<Emission> on_nack(const Nack& nack, FaceId arrival, SimTime) {
    ++counters_.nacks_in;
    std::vector<Emission> out;
    for (FaceId f : pit_.flush(nack.name)) {
      if (f != arrival) out.push_back(Emission{f, nack});
    }
    return out;
  }

  // Periodic maintenance: expiry sweep plus history decay.
  std::size_t sweep(SimTime now, Rng& rng) {
    std::size_t dropped = cs_.sweep(now);
    for (auto& [face, h] : histories_) {
      if (h) h->advance(now, rng);
    }
    return dropped;
  }

 private:
  bool erasable(const Interest& i) const { return cfg_.assume_erasable || i.can_erase; }
  bool erasable(const ContentObject& c) const { return cfg_.assume_erasable || c.can_erase; }

  void record_history(FaceId face, const Digest& digest, SimTime now) {
    if (auto it = histories_.find(face); it != histories_.end() && it->second) {
      it->second->insert(digest, now);
    }
  }

  bool histories_enabled() const { return cfg_.history.type != HistoryType::none; }

  // Ordered strategy dispatch: marking trace, then the cached entry's
  // downstream faces, then per-interface histories, then flood-or-drop.
  // Configured histories are authoritative: when none of the faces ever
  // forwarded this content, nothing downstream can hold it, so the erase
  // stops here rather than falling through to flooding.
  void route_erase(EraseMessage erase, FaceId arrival,
                   const std::optional<CacheEntry>& deleted_entry, EraseOutcome& outcome) {
    if (cfg_.marking_enabled && !erase.trace.empty()) {
      PopResult pop = pop_and_verify(erase, id_, key_);
      if (pop.status == PopStatus::ok) {
        outcome.strategy = EraseStrategy::marking;
        ++counters_.erases_marked_routed;
        if (pop.face_id != arrival && has_face(pop.face_id)) {
          outcome.emissions.push_back(Emission{pop.face_id, std::move(erase)});
        }
        return;
      }
    }

    if (deleted_entry && !deleted_entry->forwarded_faces.empty()) {
      outcome.strategy = EraseStrategy::cache_faces;
      ++counters_.erases_cache_routed;
      for (FaceId f : deleted_entry->forwarded_faces) {
        if (f != arrival) outcome.emissions.push_back(Emission{f, erase});
      }
      return;
    }

    if (histories_enabled()) {
      outcome.strategy = EraseStrategy::history;
      ++counters_.erases_history_routed;
      for (FaceId f : faces_) {
        if (f == arrival) continue;
        auto it = histories_.find(f);
        if (it != histories_.end() && it->second && it->second->query(erase.digest)) {
          outcome.emissions.push_back(Emission{f, erase});
        }
      }
      return;
    }

    if (cfg_.flood_fallback == FloodFallback::flood) {
      outcome.strategy = EraseStrategy::flood;
      ++counters_.erases_flooded;
      outcome.emissions = flood_erase(erase, arrival);
      return;
    }

    outcome.strategy = EraseStrategy::drop;
    ++counters_.erases_dropped;
  }

  bool has_face(FaceId f) const {
    return std::binary_search(faces_.begin(), faces_.end(), f);
  }

  NodeId id_;
  RouterConfig cfg_;
  std::vector<FaceId> faces_;
  MarkingKey key_;
  FibTable fib_;
  PitTable pit_;
  ContentStore cs_;
  std::map<FaceId, std::unique_ptr<ForwarderHistory>> histories_;
  std::unordered_set<std::uint64_t> seen_erases_;
  RouterCounters counters_;
};

}  // namespace bead
