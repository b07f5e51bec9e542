#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bead/auth.hpp"
#include "bead/forwarder.hpp"
#include "bead/marking.hpp"
#include "bead/messages.hpp"
#include "bead/metrics.hpp"
#include "bead/name.hpp"
#include "bead/rng.hpp"
#include "bead/topology.hpp"

namespace bead {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class EraseMode { none, plain, traced };

struct ConsumerParams {
  double rate = 10.0;          // interests per second per consumer
  bool shared_names = true;    // same name universe for all consumers
  double start_spread_s = 0;   // consumer i starts at i * spread / count
  std::uint64_t max_interests = 0;  // 0 = keep going until the run ends
  bool can_erase = true;
};

struct ProducerParams {
  Name prefix = Name::parse("/prefix/A");
  std::size_t payload_bytes = 4096;
  double expiry_s = 60.0;
  double erase_fraction = 0.5;   // share of published names erased per period
  double erase_period_s = 1.0;
  EraseMode mode = EraseMode::plain;
};

struct AdversaryParams {
  bool enabled = false;
  NodeId node = 0;          // must be a consumer-role node
  Name target = Name::parse("/prefix/A/0");
  double fetch_at_s = 1.0;  // request the target to learn its digest
  double forge_after_s = 1.0;
  std::uint64_t forge_count = 1;  // forged erases injected, each a fresh token
  double forge_spacing_s = 0.001;
};

struct SimParams {
  std::uint64_t seed = 1;
  double duration_s = 10.0;
  double sweep_interval_s = 1.0;
  SizeConfig sizes;
  ConsumerParams consumers;
  ProducerParams producer;
  AdversaryParams adversary;
  std::map<NodeId, RouterConfig> router_configs;  // one entry per topology node
};

// Deterministic discrete-event engine wiring Router instances to a topology,
// with consumer/producer agents and optional adversary. All randomness flows
// from the single seeded stream; same inputs produce byte-identical metrics.
class Simulator {
 public:
  Simulator(const Topology& topo, const RouteTable& routes, SimParams params)
      : topo_(topo), params_(std::move(params)), rng_(params_.seed),
        end_(seconds(params_.duration_s)) {
    build_nodes(routes);
    build_agents();
  }

  Router& router(NodeId id) {
    auto it = routers_.find(id);
    if (it == routers_.end()) throw ConfigError("no such node: " + std::to_string(id));
    return *it->second;
  }

  SimTime now() const { return now_; }
  const Metrics& metrics() const { return metrics_; }

  Metrics run() {
    prime_schedule();
    while (!queue_.empty() && queue_.top().time <= end_) {
      Scheduled ev = queue_.top();
      queue_.pop();
      if (ev.time < now_) throw std::logic_error("event scheduled in the past");
      now_ = ev.time;
      ev.fn();
      ++metrics_.events_executed;
    }
    drain_in_flight();
    finalize();
    return metrics_;
  }

 private:
  struct Scheduled {
    SimTime time = 0;
    std::uint64_t seq = 0;
    std::function<void()> fn;
    bool is_delivery = false;
    NodeId sender = 0;
    FaceId sender_face = 0;
    std::uint64_t bytes = 0;
  };
  struct Later {
    bool operator()(const Scheduled& a, const Scheduled& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };

  struct Consumer {
    NodeId node = 0;
    SimTime start = 0;
    std::uint64_t sent = 0;
    std::uint64_t seq = 0;
    std::map<Name, std::uint32_t> pending;
  };

  struct Published {
    DeletionToken token;
    Bytes token_digest;
    SimTime expiry = 0;
    Digest digest;
  };

  // ---- setup -------------------------------------------------------------

  void build_nodes(const RouteTable& routes) {
    std::vector<NodeId> producers = topo_.producer_ids();
    if (producers.size() != 1) {
      throw ConfigError("scenario needs exactly one producer node");
    }
    producer_node_ = producers.front();

    for (const auto& n : topo_.nodes()) {
      roles_[n.id] = n.role;
    }
    for (const auto& [id, role] : roles_) {
      auto cfg_it = params_.router_configs.find(id);
      if (cfg_it == params_.router_configs.end()) {
        throw ConfigError("no router config for node " + std::to_string(id));
      }
      std::vector<FaceId> faces = topo_.faces(id);
      if (role != NodeRole::router) faces.push_back(kLocalFace);
      routers_.emplace(id, std::make_unique<Router>(id, cfg_it->second, std::move(faces),
                                                    generate_marking_key(rng_)));
    }
    for (const auto& [id, entries] : routes.entries) {
      for (const auto& e : entries) {
        router(id).fib().add_route(e.prefix, e.face);
      }
    }
    router(producer_node_).fib().add_route(params_.producer.prefix, kLocalFace);

    if (params_.adversary.enabled) {
      auto it = roles_.find(params_.adversary.node);
      if (it == roles_.end() || it->second != NodeRole::consumer) {
        throw ConfigError("adversary must attach to a consumer node");
      }
    }
  }

  void build_agents() {
    std::vector<NodeId> ids = topo_.consumer_ids();
    std::size_t count = 0;
    for (NodeId id : ids) {
      if (params_.adversary.enabled && id == params_.adversary.node) continue;
      ++count;
    }
    std::size_t i = 0;
    for (NodeId id : ids) {
      if (params_.adversary.enabled && id == params_.adversary.node) continue;
      Consumer c;
      c.node = id;
      c.start = count == 0 ? 0
                           : seconds(params_.consumers.start_spread_s *
                                     static_cast<double>(i) / static_cast<double>(count));
      consumers_.push_back(std::move(c));
      ++i;
    }
  }

  // ---- scheduling --------------------------------------------------------

  void schedule(SimTime t, std::function<void()> fn) {
    queue_.push(Scheduled{t, next_seq_++, std::move(fn)});
  }

  void prime_schedule() {
    for (std::size_t i = 0; i < consumers_.size(); ++i) {
      if (consumers_[i].start <= end_) {
        schedule(consumers_[i].start, [this, i] { consumer_fire(i); });
      }
    }
    if (params_.producer.mode != EraseMode::none && params_.producer.erase_period_s > 0) {
      SimTime first = seconds(params_.producer.erase_period_s);
      if (first <= end_) schedule(first, [this] { producer_erase_tick(); });
    }
    if (params_.adversary.enabled) {
      SimTime t = seconds(params_.adversary.fetch_at_s);
      if (t <= end_) schedule(t, [this] { adversary_fetch(); });
    }
    if (params_.sweep_interval_s > 0) {
      SimTime t = seconds(params_.sweep_interval_s);
      if (t <= end_) schedule(t, [this] { sweep_tick(); });
    }
  }

  // ---- message movement ----------------------------------------------------

  void emit_from(NodeId node, std::vector<Emission> emissions) {
    for (auto& em : emissions) {
      if (em.face == kLocalFace) {
        Message msg = std::move(em.msg);
        schedule(now_, [this, node, msg = std::move(msg)] { agent_receive(node, msg); });
        continue;
      }
      const auto& nbrs = topo_.neighbors(node);
      auto pit = nbrs.find(em.face);
      if (pit == nbrs.end()) continue;  // emission onto a face with no link
      const Peer& peer = pit->second;
      std::uint64_t bytes = message_size_bytes(em.msg, params_.sizes);
      metrics_.traffic[node].add_out(message_class(em.msg), bytes);
      metrics_.link_sent[{node, em.face}] += bytes;

      Scheduled ev;
      ev.time = now_ + peer.delay;
      ev.seq = next_seq_++;
      ev.is_delivery = true;
      ev.sender = node;
      ev.sender_face = em.face;
      ev.bytes = bytes;
      NodeId dst = peer.node;
      FaceId dst_face = peer.face;
      NodeId src = node;
      FaceId src_face = em.face;
      Message msg = std::move(em.msg);
      ev.fn = [this, dst, dst_face, src, src_face, bytes, msg = std::move(msg)] {
        metrics_.traffic[dst].add_in(message_class(msg), bytes);
        metrics_.link_received[{src, src_face}] += bytes;
        dispatch(dst, msg, dst_face);
      };
      queue_.push(std::move(ev));
    }
  }

  void dispatch(NodeId node, const Message& msg, FaceId arrival) {
    Router& r = router(node);
    if (const auto* i = std::get_if<Interest>(&msg)) {
      emit_from(node, r.on_interest(*i, arrival, now_));
    } else if (const auto* c = std::get_if<ContentObject>(&msg)) {
      emit_from(node, r.on_content(*c, arrival, now_));
    } else if (const auto* e = std::get_if<EraseMessage>(&msg)) {
      handle_erase_at(node, *e, arrival);
    } else if (const auto* n = std::get_if<Nack>(&msg)) {
      emit_from(node, r.on_nack(*n, arrival, now_));
    }
  }

  void handle_erase_at(NodeId node, const EraseMessage& e, FaceId arrival) {
    Router& r = router(node);
    std::uint64_t ident = erase_identity(e);
    auto clock0 = std::chrono::steady_clock::now();
    EraseOutcome outcome = r.on_erase(e, arrival, now_);
    auto clock1 = std::chrono::steady_clock::now();
    metrics_.timings[node].add(std::chrono::duration<double, std::milli>(clock1 - clock0).count());

    if (roles_.at(node) == NodeRole::router) {
      auto it = erase_index_.find(ident);
      if (it != erase_index_.end()) {
        metrics_.erases[it->second].received.insert(node);
        if (outcome.deleted) metrics_.erases[it->second].deleted_at.insert(node);
      }
    }
    emit_from(node, std::move(outcome.emissions));
  }

  // ---- agents --------------------------------------------------------------

  Name consumer_name(const Consumer& c) const {
    if (params_.consumers.shared_names) {
      return params_.producer.prefix.appended(std::to_string(c.seq));
    }
    return params_.producer.prefix.appended(std::to_string(c.node))
        .appended(std::to_string(c.seq));
  }

  void consumer_fire(std::size_t idx) {
    Consumer& c = consumers_[idx];
    Name name = consumer_name(c);
    ++c.seq;
    ++c.sent;
    InterestLedger& ledger = metrics_.interests[c.node];
    ++ledger.issued;
    ++c.pending[name];

    Interest interest;
    interest.name = name;
    interest.can_erase = params_.consumers.can_erase;
    emit_from(c.node, router(c.node).on_interest(std::move(interest), kLocalFace, now_));

    if (params_.consumers.max_interests == 0 || c.sent < params_.consumers.max_interests) {
      if (params_.consumers.rate > 0) {
        SimTime next = now_ + seconds(1.0 / params_.consumers.rate);
        if (next <= end_) schedule(next, [this, idx] { consumer_fire(idx); });
      }
    }
  }

  void consumer_receive(NodeId node, const Message& msg) {
    Consumer* c = nullptr;
    for (auto& cand : consumers_) {
      if (cand.node == node) {
        c = &cand;
        break;
      }
    }
    InterestLedger& ledger = metrics_.interests[node];
    auto settle = [&](const Name& name, std::uint64_t InterestLedger::* slot) {
      if (!c) {
        ++ledger.spurious;
        return;
      }
      auto it = c->pending.find(name);
      if (it == c->pending.end()) {
        ++ledger.spurious;
        return;
      }
      if (--it->second == 0) c->pending.erase(it);
      ++(ledger.*slot);
    };
    if (const auto* content = std::get_if<ContentObject>(&msg)) {
      settle(content->name, &InterestLedger::satisfied);
    } else if (const auto* nack = std::get_if<Nack>(&msg)) {
      settle(nack->name, &InterestLedger::nacked);
    }
    // Erases and interests delivered to a consumer agent are ignored.
  }

  void producer_receive(const Message& msg) {
    const auto* interest = std::get_if<Interest>(&msg);
    if (!interest) return;  // producers ignore everything but interests
    const Name& name = interest->name;
    if (!params_.producer.prefix.is_prefix_of(name)) return;

    if (!interest->trace.empty()) {
      traces_.record(name, interest->trace);
    }

    auto it = published_.find(name);
    if (it == published_.end() || it->second.expiry <= now_) {
      Published p;
      p.token = generate_token(rng_, params_.sizes.lambda_bits);
      p.token_digest = token_digest_of(p.token);
      p.expiry = now_ + seconds(params_.producer.expiry_s);
      ContentObject probe = make_content(name, p);
      p.digest = content_digest(probe, params_.sizes.lambda_bits);
      it = published_.insert_or_assign(name, std::move(p)).first;
    }
    ContentObject content = make_content(name, it->second);
    emit_from(producer_node_,
              router(producer_node_).on_content(std::move(content), kLocalFace, now_));
  }

  ContentObject make_content(const Name& name, const Published& p) const {
    ContentObject c;
    c.name = name;
    c.payload = Bytes(params_.producer.payload_bytes, 0);
    c.expiry_time = p.expiry;
    c.token_digest = p.token_digest;
    c.can_erase = true;
    return c;
  }

  void producer_erase_tick() {
    std::vector<Name> selected;
    for (const auto& [name, p] : published_) {
      if (rng_.bernoulli(params_.producer.erase_fraction)) selected.push_back(name);
    }
    for (const Name& name : selected) {
      issue_erases(name, published_.at(name));
      published_.erase(name);
      traces_.forget(name);
    }
    SimTime next = now_ + seconds(params_.producer.erase_period_s);
    if (next <= end_) schedule(next, [this] { producer_erase_tick(); });
  }

  void issue_erases(const Name& name, const Published& p) {
    std::vector<EraseMessage> msgs;
    if (params_.producer.mode == EraseMode::traced) {
      msgs = traces_.erase_messages_for(name, p.digest, p.token.secret);
    }
    bool traced = !msgs.empty();
    if (!traced) {
      msgs.push_back(EraseMessage{name, p.digest, p.token.secret, {}});
    }
    EraseRecord rec;
    rec.id = static_cast<EraseId>(metrics_.erases.size());
    rec.name = name;
    rec.digest_hex = p.digest.hex();
    rec.issued_at = now_;
    rec.forged = false;
    for (const auto& m : msgs) rec.trace_tuples += m.trace.size();
    snapshot_holders(name, p.digest, rec);
    erase_index_[erase_identity(msgs.front())] = rec.id;
    metrics_.erases.push_back(std::move(rec));

    if (traced) {
      // Each traced erase is aimed at its path's last marking router, which
      // is a direct neighbor of the producer when every router marks. The
      // producer's own cached copy goes away up front.
      router(producer_node_).cs().erase_match(name, p.digest);
      for (auto& m : msgs) {
        auto face = face_toward(producer_node_, m.trace.front().router_id);
        if (face) {
          std::vector<Emission> one;
          one.push_back(Emission{*face, std::move(m)});
          emit_from(producer_node_, std::move(one));
        } else {
          handle_erase_at(producer_node_, m, kLocalFace);
        }
      }
    } else {
      handle_erase_at(producer_node_, msgs.front(), kLocalFace);
    }
  }

  std::optional<FaceId> face_toward(NodeId from, NodeId neighbor) const {
    for (const auto& [face, peer] : topo_.neighbors(from)) {
      if (peer.node == neighbor) return face;
    }
    return std::nullopt;
  }

  void snapshot_holders(const Name& name, const Digest& digest, EraseRecord& rec) const {
    for (const auto& [id, r] : routers_) {
      if (roles_.at(id) != NodeRole::router) continue;
      const CacheEntry* e = r->cs().peek(name);
      if (e && e->digest == digest && e->content.expiry_time > now_) {
        rec.cached_at_issue.insert(id);
      }
    }
  }

  void adversary_fetch() {
    Interest interest;
    interest.name = params_.adversary.target;
    interest.can_erase = true;
    emit_from(params_.adversary.node,
              router(params_.adversary.node).on_interest(std::move(interest), kLocalFace, now_));
  }

  void adversary_receive(const Message& msg) {
    const auto* content = std::get_if<ContentObject>(&msg);
    if (!content || forged_sent_ || content->name != params_.adversary.target) return;
    forged_sent_ = true;
    Name name = content->name;
    Digest digest = content_digest(*content, params_.sizes.lambda_bits);
    for (std::uint64_t k = 0; k < params_.adversary.forge_count; ++k) {
      SimTime t = now_ + seconds(params_.adversary.forge_after_s +
                                 static_cast<double>(k) * params_.adversary.forge_spacing_s);
      if (t > end_) break;
      schedule(t, [this, name, digest] { inject_forged(name, digest); });
    }
  }

  void inject_forged(const Name& name, const Digest& digest) {
    EraseMessage forged;
    forged.name = name;
    forged.digest = digest;
    forged.token = rng_.bytes(params_.sizes.lambda_bits / 8);  // wrong token
    EraseRecord rec;
    rec.id = static_cast<EraseId>(metrics_.erases.size());
    rec.name = forged.name;
    rec.digest_hex = forged.digest.hex();
    rec.issued_at = now_;
    rec.forged = true;
    snapshot_holders(forged.name, forged.digest, rec);
    erase_index_[erase_identity(forged)] = rec.id;
    metrics_.erases.push_back(std::move(rec));
    handle_erase_at(params_.adversary.node, forged, kLocalFace);
  }

  void agent_receive(NodeId node, const Message& msg) {
    NodeRole role = roles_.at(node);
    if (role == NodeRole::producer) {
      producer_receive(msg);
    } else if (params_.adversary.enabled && node == params_.adversary.node) {
      adversary_receive(msg);
    } else if (role == NodeRole::consumer) {
      consumer_receive(node, msg);
    }
  }

  void sweep_tick() {
    for (const auto& [id, r] : routers_) {
      r->sweep(now_, rng_);
    }
    SimTime next = now_ + seconds(params_.sweep_interval_s);
    if (next <= end_) schedule(next, [this] { sweep_tick(); });
  }

  // ---- teardown ------------------------------------------------------------

  void drain_in_flight() {
    while (!queue_.empty()) {
      const Scheduled& ev = queue_.top();
      if (ev.is_delivery) {
        metrics_.link_in_flight[{ev.sender, ev.sender_face}] += ev.bytes;
      }
      queue_.pop();
    }
  }

  void finalize() {
    for (const auto& [id, r] : routers_) {
      metrics_.router_counters[id] = r->counters();
    }
    for (const auto& c : consumers_) {
      std::uint64_t pending = 0;
      for (const auto& [name, count] : c.pending) pending += count;
      metrics_.interests[c.node].pending_at_end = pending;
    }
    metrics_.end_time = end_;
  }

  const Topology& topo_;
  SimParams params_;
  Rng rng_;
  SimTime end_;
  SimTime now_ = 0;
  std::uint64_t next_seq_ = 0;

  std::map<NodeId, NodeRole> roles_;
  std::map<NodeId, std::unique_ptr<Router>> routers_;
  NodeId producer_node_ = 0;

  std::vector<Consumer> consumers_;
  std::map<Name, Published> published_;
  TokenStore tokens_;
  TraceStore traces_;
  bool forged_sent_ = false;

  std::map<std::uint64_t, EraseId> erase_index_;
  std::priority_queue<Scheduled, std::vector<Scheduled>, Later> queue_;
  Metrics metrics_;
};

}  // namespace bead
