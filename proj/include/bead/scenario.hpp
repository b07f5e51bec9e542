#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bead/forwarder.hpp"
#include "bead/hash.hpp"
#include "bead/simulator.hpp"
#include "bead/topology.hpp"

namespace bead {

// ---------------------------------------------------------------------------
// Small parsing helpers shared with the CLI.
// ---------------------------------------------------------------------------

inline std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

inline bool parse_bool(const std::string& v) {
  if (v == "true" || v == "yes" || v == "1" || v == "on") return true;
  if (v == "false" || v == "no" || v == "0" || v == "off") return false;
  throw std::invalid_argument("not a boolean: " + v);
}

// Byte quantities with binary-power suffixes: "4096", "32B", "4GiB", "1TiB".
inline std::uint64_t parse_bytes(const std::string& v) {
  std::string s = trim(v);
  double factor = 1;
  auto ends_with = [&s](const char* suf) {
    std::size_t n = std::string(suf).size();
    return s.size() > n && s.compare(s.size() - n, n, suf) == 0;
  };
  if (ends_with("TiB")) factor = 1099511627776.0, s.resize(s.size() - 3);
  else if (ends_with("GiB")) factor = 1073741824.0, s.resize(s.size() - 3);
  else if (ends_with("MiB")) factor = 1048576.0, s.resize(s.size() - 3);
  else if (ends_with("KiB")) factor = 1024.0, s.resize(s.size() - 3);
  else if (ends_with("B")) factor = 1.0, s.resize(s.size() - 1);
  s = trim(s);
  std::size_t used = 0;
  double num = std::stod(s, &used);
  if (used != s.size() || num < 0) throw std::invalid_argument("not a byte quantity: " + v);
  return static_cast<std::uint64_t>(num * factor + 0.5);
}

// Id sets: "7", "0-9", "0-9,160,200-203".
inline std::set<NodeId> parse_id_set(const std::string& v) {
  std::set<NodeId> out;
  std::istringstream in(v);
  std::string part;
  while (std::getline(in, part, ',')) {
    part = trim(part);
    if (part.empty()) throw std::invalid_argument("empty id range element");
    std::size_t dash = part.find('-');
    if (dash == std::string::npos) {
      out.insert(static_cast<NodeId>(std::stoul(part)));
    } else {
      NodeId lo = static_cast<NodeId>(std::stoul(part.substr(0, dash)));
      NodeId hi = static_cast<NodeId>(std::stoul(part.substr(dash + 1)));
      if (hi < lo) throw std::invalid_argument("reversed id range: " + part);
      for (NodeId i = lo; i <= hi; ++i) out.insert(i);
    }
  }
  if (out.empty()) throw std::invalid_argument("empty id set");
  return out;
}

inline std::string sha256_hex_of_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string text = buf.str();
  return hash_digest(as_bytes(text)).hex();
}

// ---------------------------------------------------------------------------
// Scenario configuration: line-oriented `key = value` grammar with
// `[section]` headers and `#` comments. See docs/scenario-format.md.
// ---------------------------------------------------------------------------

struct ClassOverride {
  std::string label;
  std::set<NodeId> ids;
  RouterConfig config;
  bool ids_set = false;
};

struct ScenarioConfig {
  std::optional<std::uint64_t> seed;
  double duration_s = 10.0;
  double sweep_interval_s = 1.0;

  std::string topology_file;  // exclusive with tree_height / random_*
  std::size_t tree_height = 0;
  std::size_t random_routers = 0, random_consumers = 0, random_extra = 0;

  SizeConfig sizes;
  ConsumerParams consumers;
  ProducerParams producer;
  AdversaryParams adversary;

  RouterConfig router_defaults = default_router_node();
  RouterConfig consumer_node = default_consumer_node();
  RouterConfig producer_node = default_producer_node();
  std::vector<ClassOverride> classes;

  std::string base_dir;  // directory of the scenario file, for relative paths

  static RouterConfig default_router_node() {
    RouterConfig rc;
    rc.cache_capacity = 0;
    rc.flood_fallback = FloodFallback::flood;
    return rc;
  }
  static RouterConfig default_consumer_node() {
    RouterConfig rc;
    rc.cache_capacity = 0;
    rc.flood_fallback = FloodFallback::drop;
    return rc;
  }
  static RouterConfig default_producer_node() {
    RouterConfig rc;
    rc.cache_capacity = 65536;
    rc.flood_fallback = FloodFallback::drop;
    return rc;
  }
};

namespace detail {

inline void apply_router_key(RouterConfig& rc, const std::string& key, const std::string& value) {
  if (key == "cache_capacity") rc.cache_capacity = std::stoull(value);
  else if (key == "marking") rc.marking_enabled = parse_bool(value);
  else if (key == "assume_erasable") rc.assume_erasable = parse_bool(value);
  else if (key == "flood_fallback") {
    if (value == "flood") rc.flood_fallback = FloodFallback::flood;
    else if (value == "drop") rc.flood_fallback = FloodFallback::drop;
    else throw std::invalid_argument("flood_fallback must be flood|drop");
  } else if (key == "history_insert") {
    if (value == "on_forward") rc.history_insert = HistoryInsert::on_forward;
    else if (value == "on_evict") rc.history_insert = HistoryInsert::on_evict;
    else throw std::invalid_argument("history_insert must be on_forward|on_evict");
  } else if (key == "history") rc.history.type = parse_history_type(value);
  else if (key == "history_m_bits") {
    // Plain integers are bits; byte suffixes convert (e.g. 4GiB of filter).
    rc.history.m_bits = value.find_first_not_of("0123456789") == std::string::npos
                            ? std::stoull(value)
                            : parse_bytes(value) * 8;
  } else if (key == "history_capacity") rc.history.capacity_entries = std::stoull(value);
  else if (key == "history_k") rc.history.k = value == "auto" ? 0 : std::stoull(value);
  else if (key == "history_expected") rc.history.expected_entries = std::stoull(value);
  else if (key == "history_k_max") rc.history.k_max = std::stoull(value);
  else if (key == "history_chunk_count") rc.history.chunk_count = std::stoull(value);
  else if (key == "history_chunk_window_s") rc.history.chunk_window_s = std::stod(value);
  else if (key == "history_reset_threshold") rc.history.reset_threshold = std::stod(value);
  else if (key == "history_mean_expiry_s") rc.history.mean_expiry_s = std::stod(value);
  else throw std::invalid_argument("unknown router key: " + key);
}

}  // namespace detail

inline ScenarioConfig parse_scenario(std::istream& in, const std::string& base_dir = ".") {
  ScenarioConfig cfg;
  cfg.base_dir = base_dir;
  std::string line;
  std::string section = "run";
  std::size_t line_no = 0;

  auto fail = [&line_no](const std::string& msg) -> void {
    throw ConfigError("scenario line " + std::to_string(line_no) + ": " + msg);
  };

  while (std::getline(in, line)) {
    ++line_no;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') fail("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.rfind("class ", 0) == 0) {
        ClassOverride ov;
        ov.label = trim(section.substr(6));
        if (ov.label.empty()) fail("class section needs a label");
        ov.config = cfg.router_defaults;
        cfg.classes.push_back(std::move(ov));
      }
      continue;
    }

    std::size_t eq = line.find('=');
    if (eq == std::string::npos) fail("expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) fail("empty key or value");

    try {
      if (section == "run") {
        if (key == "seed") cfg.seed = std::stoull(value);
        else if (key == "duration_s") cfg.duration_s = std::stod(value);
        else if (key == "sweep_interval_s") cfg.sweep_interval_s = std::stod(value);
        else fail("unknown [run] key: " + key);
      } else if (section == "topology") {
        if (key == "file") cfg.topology_file = value;
        else if (key == "tree") cfg.tree_height = std::stoull(value);
        else if (key == "random_routers") cfg.random_routers = std::stoull(value);
        else if (key == "random_consumers") cfg.random_consumers = std::stoull(value);
        else if (key == "random_extra_links") cfg.random_extra = std::stoull(value);
        else fail("unknown [topology] key: " + key);
      } else if (section == "sizes") {
        if (key == "payload") cfg.producer.payload_bytes = parse_bytes(value);
        else if (key == "lambda_bits") cfg.sizes.lambda_bits = std::stoull(value);
        else if (key == "interest_header") cfg.sizes.interest_header = parse_bytes(value);
        else if (key == "content_header") cfg.sizes.content_header = parse_bytes(value);
        else if (key == "erase_header") cfg.sizes.erase_header = parse_bytes(value);
        else if (key == "nack_header") cfg.sizes.nack_header = parse_bytes(value);
        else fail("unknown [sizes] key: " + key);
      } else if (section == "consumers") {
        if (key == "rate") cfg.consumers.rate = std::stod(value);
        else if (key == "names") {
          if (value == "shared") cfg.consumers.shared_names = true;
          else if (value == "private") cfg.consumers.shared_names = false;
          else fail("names must be shared|private");
        } else if (key == "start_spread_s") cfg.consumers.start_spread_s = std::stod(value);
        else if (key == "max_interests") cfg.consumers.max_interests = std::stoull(value);
        else if (key == "can_erase") cfg.consumers.can_erase = parse_bool(value);
        else fail("unknown [consumers] key: " + key);
      } else if (section == "producer") {
        if (key == "prefix") cfg.producer.prefix = Name::parse(value);
        else if (key == "expiry_s") cfg.producer.expiry_s = std::stod(value);
        else if (key == "erase_fraction") cfg.producer.erase_fraction = std::stod(value);
        else if (key == "erase_period_s") cfg.producer.erase_period_s = std::stod(value);
        else if (key == "erase_mode") {
          if (value == "none") cfg.producer.mode = EraseMode::none;
          else if (value == "plain") cfg.producer.mode = EraseMode::plain;
          else if (value == "traced") cfg.producer.mode = EraseMode::traced;
          else fail("erase_mode must be none|plain|traced");
        } else fail("unknown [producer] key: " + key);
      } else if (section == "adversary") {
        if (key == "enabled") cfg.adversary.enabled = parse_bool(value);
        else if (key == "node") cfg.adversary.node = static_cast<NodeId>(std::stoul(value));
        else if (key == "target") cfg.adversary.target = Name::parse(value);
        else if (key == "fetch_at_s") cfg.adversary.fetch_at_s = std::stod(value);
        else if (key == "forge_after_s") cfg.adversary.forge_after_s = std::stod(value);
        else if (key == "forge_count") cfg.adversary.forge_count = std::stoull(value);
        else if (key == "forge_spacing_s") cfg.adversary.forge_spacing_s = std::stod(value);
        else fail("unknown [adversary] key: " + key);
      } else if (section == "routers") {
        detail::apply_router_key(cfg.router_defaults, key, value);
      } else if (section == "consumer_nodes") {
        detail::apply_router_key(cfg.consumer_node, key, value);
      } else if (section == "producer_node") {
        detail::apply_router_key(cfg.producer_node, key, value);
      } else if (section.rfind("class ", 0) == 0) {
        ClassOverride& ov = cfg.classes.back();
        if (key == "ids") {
          ov.ids = parse_id_set(value);
          ov.ids_set = true;
        } else {
          detail::apply_router_key(ov.config, key, value);
        }
      } else {
        fail("unknown section: [" + section + "]");
      }
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception& e) {
      fail(std::string(e.what()));
    }
  }

  for (const auto& ov : cfg.classes) {
    if (!ov.ids_set) throw ConfigError("class '" + ov.label + "' has no ids");
  }
  bool has_file = !cfg.topology_file.empty();
  bool has_tree = cfg.tree_height > 0;
  bool has_random = cfg.random_routers > 0;
  if (has_file + has_tree + has_random != 1) {
    throw ConfigError("[topology] needs exactly one of file / tree / random_routers");
  }
  return cfg;
}

inline ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open scenario file: " + path);
  std::string dir = ".";
  auto slash = path.find_last_of('/');
  if (slash != std::string::npos) dir = path.substr(0, slash);
  return parse_scenario(in, dir);
}

// ---------------------------------------------------------------------------
// Resolution: topology + routes + per-node configs, ready to simulate.
// ---------------------------------------------------------------------------

struct ResolvedScenario {
  Topology topo;
  RouteTable routes;
  SimParams params;
};

inline ResolvedScenario resolve_scenario(const ScenarioConfig& cfg,
                                         std::optional<std::uint64_t> seed_override = {}) {
  std::uint64_t seed = 0;
  if (seed_override) seed = *seed_override;
  else if (cfg.seed) seed = *cfg.seed;
  else throw ConfigError("seed is mandatory: set [run] seed or pass --seed");

  ResolvedScenario rs;
  if (!cfg.topology_file.empty()) {
    std::string path = cfg.topology_file;
    if (!path.empty() && path.front() != '/') path = cfg.base_dir + "/" + path;
    rs.topo = load_topology_file(path);
  } else if (cfg.tree_height > 0) {
    rs.topo = build_tree(cfg.tree_height);
  } else {
    Rng topo_rng(seed ^ 0x9e3779b97f4a7c15ull);
    rs.topo = build_random(cfg.random_routers, cfg.random_consumers, cfg.random_extra,
                           topo_rng);
  }

  std::vector<NodeId> producers = rs.topo.producer_ids();
  if (producers.size() != 1) throw ConfigError("topology must have exactly one producer");
  rs.routes = populate_fibs(rs.topo, {{cfg.producer.prefix, producers.front()}});

  rs.params.seed = seed;
  rs.params.duration_s = cfg.duration_s;
  rs.params.sweep_interval_s = cfg.sweep_interval_s;
  rs.params.sizes = cfg.sizes;
  rs.params.consumers = cfg.consumers;
  rs.params.producer = cfg.producer;
  rs.params.adversary = cfg.adversary;

  for (const auto& n : rs.topo.nodes()) {
    RouterConfig rc;
    switch (n.role) {
      case NodeRole::router: rc = cfg.router_defaults; break;
      case NodeRole::consumer: rc = cfg.consumer_node; break;
      case NodeRole::producer: rc = cfg.producer_node; break;
    }
    for (const auto& ov : cfg.classes) {
      if (ov.ids.contains(n.id)) rc = ov.config;
    }
    rc.sizes = cfg.sizes;
    rs.params.router_configs[n.id] = rc;
  }
  return rs;
}

}  // namespace bead
