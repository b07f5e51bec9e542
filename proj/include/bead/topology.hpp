#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bead/messages.hpp"
#include "bead/name.hpp"
#include "bead/rng.hpp"

namespace bead {

enum class NodeRole { router, consumer, producer };

inline const char* to_string(NodeRole r) {
  switch (r) {
    case NodeRole::router: return "router";
    case NodeRole::consumer: return "consumer";
    case NodeRole::producer: return "producer";
  }
  return "?";
}

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

class ValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct TopoNode {
  NodeId id;
  NodeRole role;
};

struct TopoLink {
  NodeId a;
  FaceId face_a;
  NodeId b;
  FaceId face_b;
  SimTime delay;
};

struct Peer {
  NodeId node;
  FaceId face;     // the peer's face on this link
  SimTime delay;
};

class Topology {
 public:
  void add_node(NodeId id, NodeRole role) {
    if (adjacency_.contains(id)) {
      throw ValidationError("duplicate node id " + std::to_string(id));
    }
    nodes_.push_back(TopoNode{id, role});
    adjacency_[id];
  }

  void add_link(NodeId a, FaceId face_a, NodeId b, FaceId face_b, SimTime delay) {
    auto ita = adjacency_.find(a);
    auto itb = adjacency_.find(b);
    if (ita == adjacency_.end() || itb == adjacency_.end()) {
      throw ValidationError("link references unknown node");
    }
    if (a == b) throw ValidationError("self-link on node " + std::to_string(a));
    if (ita->second.contains(face_a)) {
      throw ValidationError("duplicate face " + std::to_string(face_a) + " on node " +
                            std::to_string(a));
    }
    if (itb->second.contains(face_b)) {
      throw ValidationError("duplicate face " + std::to_string(face_b) + " on node " +
                            std::to_string(b));
    }
    links_.push_back(TopoLink{a, face_a, b, face_b, delay});
    ita->second.emplace(face_a, Peer{b, face_b, delay});
    itb->second.emplace(face_b, Peer{a, face_a, delay});
  }

  const std::vector<TopoNode>& nodes() const { return nodes_; }
  const std::vector<TopoLink>& links() const { return links_; }

  bool has_node(NodeId id) const { return adjacency_.contains(id); }

  NodeRole role(NodeId id) const {
    for (const auto& n : nodes_) {
      if (n.id == id) return n.role;
    }
    throw ValidationError("unknown node id " + std::to_string(id));
  }

  // Face -> peer map for one node, ordered by face id.
  const std::map<FaceId, Peer>& neighbors(NodeId id) const {
    auto it = adjacency_.find(id);
    if (it == adjacency_.end()) {
      throw ValidationError("unknown node id " + std::to_string(id));
    }
    return it->second;
  }

  std::vector<FaceId> faces(NodeId id) const {
    std::vector<FaceId> out;
    for (const auto& [face, peer] : neighbors(id)) out.push_back(face);
    return out;
  }

  std::vector<NodeId> ids_with_role(NodeRole role) const {
    std::vector<NodeId> out;
    for (const auto& n : nodes_) {
      if (n.role == role) out.push_back(n.id);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  std::vector<NodeId> router_ids() const { return ids_with_role(NodeRole::router); }
  std::vector<NodeId> consumer_ids() const { return ids_with_role(NodeRole::consumer); }
  std::vector<NodeId> producer_ids() const { return ids_with_role(NodeRole::producer); }

  // Structural invariants: connectedness and sane endpoint attachment
  // (no consumer-to-consumer links; endpoints must have at least one link).
  void validate() const {
    if (nodes_.empty()) throw ValidationError("topology has no nodes");
    std::set<NodeId> reached;
    std::queue<NodeId> frontier;
    frontier.push(nodes_.front().id);
    reached.insert(nodes_.front().id);
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop();
      for (const auto& [face, peer] : adjacency_.at(u)) {
        if (reached.insert(peer.node).second) frontier.push(peer.node);
      }
    }
    if (reached.size() != nodes_.size()) {
      throw ValidationError("topology is disconnected");
    }
    for (const auto& n : nodes_) {
      if (n.role == NodeRole::router) continue;
      const auto& nbrs = adjacency_.at(n.id);
      if (nbrs.empty()) {
        throw ValidationError("node " + std::to_string(n.id) + " has no links");
      }
      if (n.role == NodeRole::consumer) {
        for (const auto& [face, peer] : nbrs) {
          if (role(peer.node) == NodeRole::consumer) {
            throw ValidationError("consumer-to-consumer link at node " + std::to_string(n.id));
          }
        }
      }
    }
  }

 private:
  std::vector<TopoNode> nodes_;
  std::vector<TopoLink> links_;
  std::map<NodeId, std::map<FaceId, Peer>> adjacency_;
};

// ---------------------------------------------------------------------------
// File grammar: `node <id> <role>`, `link <idA> <faceA> <idB> <faceB>
// <delay_ms>`, `#` comments, blank lines ignored.
// ---------------------------------------------------------------------------

inline Topology load_topology(std::istream& in) {
  Topology topo;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    std::string directive;
    if (!(fields >> directive)) continue;

    try {
      if (directive == "node") {
        std::uint64_t id = 0;
        std::string role_word;
        if (!(fields >> id >> role_word)) throw ParseError(line_no, "node needs <id> <role>");
        NodeRole role;
        if (role_word == "router") role = NodeRole::router;
        else if (role_word == "consumer") role = NodeRole::consumer;
        else if (role_word == "producer") role = NodeRole::producer;
        else throw ParseError(line_no, "unknown role: " + role_word);
        topo.add_node(static_cast<NodeId>(id), role);
      } else if (directive == "link") {
        std::uint64_t a = 0, b = 0;
        std::uint32_t face_a = 0, face_b = 0;
        double delay_ms = 0;
        if (!(fields >> a >> face_a >> b >> face_b >> delay_ms)) {
          throw ParseError(line_no, "link needs <idA> <faceA> <idB> <faceB> <delay_ms>");
        }
        if (delay_ms < 0) throw ParseError(line_no, "negative delay");
        if (face_a > 0xFFFE || face_b > 0xFFFE) throw ParseError(line_no, "face id too large");
        topo.add_link(static_cast<NodeId>(a), static_cast<FaceId>(face_a),
                      static_cast<NodeId>(b), static_cast<FaceId>(face_b),
                      seconds(delay_ms / 1000.0));
      } else {
        throw ParseError(line_no, "unknown directive: " + directive);
      }
    } catch (const ValidationError& e) {
      throw ParseError(line_no, e.what());
    }
    std::string trailing;
    if (fields >> trailing) throw ParseError(line_no, "trailing tokens: " + trailing);
  }
  topo.validate();
  return topo;
}

inline Topology load_topology(const std::string& text) {
  std::istringstream in(text);
  return load_topology(in);
}

inline Topology load_topology_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open topology file: " + path);
  return load_topology(in);
}

// ---------------------------------------------------------------------------
// Builders.
// ---------------------------------------------------------------------------

// Complete binary tree of height h: producer at the root, 2^h consumers at
// the leaves, 2^h - 2 interior routers in between. Consumers take ids
// [0, 2^h); routers are numbered level by level from the root downward;
// the producer gets the highest id. h = 1 is the routerless degenerate case.
inline Topology build_tree(std::size_t h, SimTime link_delay = seconds(0.010)) {
  if (h < 1 || h > 20) throw std::invalid_argument("build_tree: h must be in [1, 20]");
  Topology topo;
  const NodeId consumer_count = NodeId{1} << h;
  const NodeId router_count = consumer_count - 2;
  const NodeId producer_id = consumer_count + router_count;

  for (NodeId c = 0; c < consumer_count; ++c) topo.add_node(c, NodeRole::consumer);
  for (NodeId r = 0; r < router_count; ++r) {
    topo.add_node(consumer_count + r, NodeRole::router);
  }
  topo.add_node(producer_id, NodeRole::producer);

  std::map<NodeId, FaceId> next_face;
  auto connect = [&](NodeId parent, NodeId child) {
    FaceId pf = next_face[parent]++;
    FaceId cf = next_face[child]++;
    topo.add_link(parent, pf, child, cf, link_delay);
  };

  // Node at (level l, index i): level 0 is the producer, levels 1..h-1 are
  // routers, level h is consumers.
  auto node_at = [&](std::size_t level, NodeId index) -> NodeId {
    if (level == 0) return producer_id;
    if (level == h) return index;
    NodeId level_base = (NodeId{1} << level) - 2;  // routers above this level
    return consumer_count + level_base + index;
  };

  for (std::size_t level = 0; level + 1 <= h; ++level) {
    NodeId width = NodeId{1} << level;
    for (NodeId i = 0; i < width; ++i) {
      NodeId parent = node_at(level, i);
      connect(parent, node_at(level + 1, 2 * i));
      connect(parent, node_at(level + 1, 2 * i + 1));
    }
  }
  topo.validate();
  return topo;
}

// Random connected graph for property tests: routers 0..n-1 joined by a
// random spanning tree plus `extra_links` chords, `consumers` leaf nodes on
// random routers, one producer on a random router. Deterministic in the RNG.
inline Topology build_random(std::size_t routers, std::size_t consumers,
                             std::size_t extra_links, Rng& rng,
                             SimTime link_delay = seconds(0.010)) {
  if (routers < 1) throw std::invalid_argument("build_random: need at least one router");
  Topology topo;
  for (NodeId r = 0; r < routers; ++r) topo.add_node(r, NodeRole::router);
  NodeId consumer_base = static_cast<NodeId>(routers);
  for (NodeId c = 0; c < consumers; ++c) {
    topo.add_node(consumer_base + c, NodeRole::consumer);
  }
  NodeId producer_id = static_cast<NodeId>(routers + consumers);
  topo.add_node(producer_id, NodeRole::producer);

  std::map<NodeId, FaceId> next_face;
  std::set<std::pair<NodeId, NodeId>> used;
  auto connect = [&](NodeId a, NodeId b) {
    FaceId fa = next_face[a]++;
    FaceId fb = next_face[b]++;
    topo.add_link(a, fa, b, fb, link_delay);
    used.insert({std::min(a, b), std::max(a, b)});
  };

  for (NodeId r = 1; r < routers; ++r) {
    connect(r, static_cast<NodeId>(rng.uniform_u64(r)));
  }
  std::size_t added = 0;
  std::size_t attempts = 0;
  while (added < extra_links && routers > 2 && attempts < 20 * extra_links + 100) {
    ++attempts;
    NodeId a = static_cast<NodeId>(rng.uniform_u64(routers));
    NodeId b = static_cast<NodeId>(rng.uniform_u64(routers));
    if (a == b || used.contains({std::min(a, b), std::max(a, b)})) continue;
    connect(a, b);
    ++added;
  }
  for (NodeId c = 0; c < consumers; ++c) {
    connect(consumer_base + c, static_cast<NodeId>(rng.uniform_u64(routers)));
  }
  connect(producer_id, static_cast<NodeId>(rng.uniform_u64(routers)));
  topo.validate();
  return topo;
}

// ---------------------------------------------------------------------------
// FIB population: shortest path by hop count, ties broken by lowest
// next-hop node id (then lowest face id for parallel links).
// ---------------------------------------------------------------------------

struct RouteEntry {
  Name prefix;
  FaceId face;
};

struct RouteTable {
  std::map<NodeId, std::vector<RouteEntry>> entries;
};

inline RouteTable populate_fibs(const Topology& topo,
                                const std::vector<std::pair<Name, NodeId>>& prefix_owners) {
  RouteTable table;
  for (const auto& [prefix, owner] : prefix_owners) {
    if (!topo.has_node(owner)) {
      throw ValidationError("prefix owner node does not exist");
    }
    std::map<NodeId, std::size_t> dist;
    dist[owner] = 0;
    std::queue<NodeId> frontier;
    frontier.push(owner);
    while (!frontier.empty()) {
      NodeId u = frontier.front();
      frontier.pop();
      for (const auto& [face, peer] : topo.neighbors(u)) {
        if (!dist.contains(peer.node)) {
          dist[peer.node] = dist[u] + 1;
          frontier.push(peer.node);
        }
      }
    }
    for (const auto& n : topo.nodes()) {
      if (n.id == owner) continue;
      auto dit = dist.find(n.id);
      if (dit == dist.end()) throw ValidationError("node unreachable from prefix owner");
      NodeId best_peer = 0;
      FaceId best_face = 0;
      bool found = false;
      for (const auto& [face, peer] : topo.neighbors(n.id)) {
        if (dist.at(peer.node) + 1 != dit->second) continue;
        if (!found || peer.node < best_peer ||
            (peer.node == best_peer && face < best_face)) {
          best_peer = peer.node;
          best_face = face;
          found = true;
        }
      }
      if (!found) throw ValidationError("no next hop found despite finite distance");
      table.entries[n.id].push_back(RouteEntry{prefix, best_face});
    }
  }
  return table;
}

}  // namespace bead
