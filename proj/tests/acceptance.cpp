// Acceptance sweep. Each numbered check prints one PASS/FAIL line; the exit
// code is the number of failures. Scenario inputs come from BEAD_SCENARIO_DIR.

#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "bead/bead.hpp"

using namespace bead;

namespace {

int failures = 0;

void report(int n, bool ok, const char* what) {
  std::printf("%s %d: %s\n", ok ? "PASS" : "FAIL", n, what);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string dir() { return BEAD_SCENARIO_DIR; }

bool near(double got, double want, double tol) { return std::fabs(got - want) <= tol; }

Digest rand_digest(Rng& rng) { return hash_digest(rng.bytes(16)); }

// ---------------------------------------------------------------------------
// 1. Store saturation calculators reproduce the worked figures.
// ---------------------------------------------------------------------------

bool check_saturation() {
  // 4 GiB store of 32 B digests filling at 3200 entries/s: ~11.6 h.
  if (!near(saturation_time(134217728.0, 3200.0), 41943.04, 1.0)) return false;
  // Same store at a 10 Gbps-class arrival rate: under two minutes.
  if (!near(saturation_time(34359738368.0, 335544320.0), 102.4, 1.0)) return false;
  // 4 GiB bloom store, k = 120, slow and fast arrival rates.
  if (!near(bloom_saturation_time(34359738368.0, 120.0, 3200.0), 89478.49, 1.0)) return false;
  if (!near(bloom_saturation_time(8796093022208.0, 107.0, 335544320.0), 244.99, 1.0)) {
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 2. Filter tuning: hash count and false-positive rate for the 4 GiB / 2e8
//    entry design point, confirmed empirically at the same fill ratio.
// ---------------------------------------------------------------------------

bool check_filter_tuning() {
  std::size_t k = optimal_k(34359738368.0, 2e8);
  if (k != 119 && k != 120) return false;
  double fp = false_positive_rate(34359738368.0, 2e8);
  if (!(fp > 0.0 && fp <= 1e-32)) return false;

  // Scale m down to 2^20 bits at the same m/n ratio: a million probes of a
  // filter this sparse must not produce a single false positive.
  const std::size_t m = std::size_t{1} << 20;
  const std::size_t n = 6104;  // m/n ~ 171.8
  BloomHistory filter(m, k, 0.0);
  Rng rng(20260814);
  for (std::size_t i = 0; i < n; ++i) filter.insert(rand_digest(rng), 0);
  for (std::size_t i = 0; i < 1000000; ++i) {
    if (filter.query(rand_digest(rng))) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// 3. Marking sizes: 38 B per tuple on the wire, linear growth per hop, and
//    the aggregate trace volume both closed-form and from a simulated
//    height-4 tree (16 leaves x 3 marking routers = 48 tuples).
// ---------------------------------------------------------------------------

bool check_marking_sizes() {
  if (TraceTuple::kWireSize != 38) return false;

  Rng rng(7);
  Interest interest;
  interest.name = Name::parse("/a/b");
  std::size_t base = message_size_bytes(interest);
  for (int hop = 0; hop < 16; ++hop) {
    MarkingKey key = generate_marking_key(rng);
    append_trace(interest, static_cast<NodeId>(hop + 1), 2, key);
  }
  if (message_size_bytes(interest) - base != 16 * 38) return false;

  if (aggregated_trace_size(16) != 37355520ull) return false;
  if (aggregated_trace_size(4) != 1824ull) return false;

  ResolvedScenario rs = resolve_scenario(parse_scenario_file(dir() + "/tree4.scn"));
  Simulator sim(rs.topo, rs.routes, rs.params);
  Metrics m = sim.run();
  if (m.erases.size() != 1) return false;
  const EraseRecord& rec = m.erases.front();
  if (rec.trace_tuples != 48) return false;
  if (rec.trace_tuples * TraceTuple::kWireSize != aggregated_trace_size(4)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 4/5. History-routed erases cover exactly what flooding covers, and
//      flooding reaches every router, across 20 seeded random topologies.
// ---------------------------------------------------------------------------

enum class CoverageMode { history, flood, pure_flood };

Metrics run_erase_coverage(const Topology& topo, const RouteTable& routes, CoverageMode mode,
                           std::uint64_t seed) {
  SimParams p;
  p.seed = seed;
  p.duration_s = 3.5;
  p.sweep_interval_s = 0;
  p.consumers.rate = 20;
  p.consumers.shared_names = true;
  p.consumers.start_spread_s = 0.5;
  p.consumers.max_interests = 6;
  p.producer.prefix = Name::parse("/p");
  p.producer.expiry_s = 3600;
  p.producer.erase_fraction = 1.0;
  p.producer.erase_period_s = 2.5;  // one tick, after traffic has quiesced
  p.producer.mode = EraseMode::plain;

  for (const auto& n : topo.nodes()) {
    RouterConfig rc;
    if (n.role == NodeRole::consumer) {
      rc.cache_capacity = 0;
      rc.flood_fallback = FloodFallback::drop;
    } else if (mode == CoverageMode::history) {
      rc.cache_capacity = 1024;
      rc.history.type = HistoryType::lossless;
      rc.flood_fallback = FloodFallback::drop;
    } else {
      rc.cache_capacity = mode == CoverageMode::flood ? 1024 : 0;
      rc.flood_fallback = FloodFallback::flood;
    }
    p.router_configs[n.id] = rc;
  }
  Simulator sim(topo, routes, p);
  return sim.run();
}

bool check_coverage_pair(bool check_flood_reach) {
  std::size_t nonvacuous = 0;
  for (int t = 0; t < 20; ++t) {
    Rng topo_rng(1000 + t);
    Topology topo = build_random(5 + (t * 7) % 26, 3 + t % 5, t % 4, topo_rng);
    RouteTable routes =
        populate_fibs(topo, {{Name::parse("/p"), topo.producer_ids().front()}});
    Metrics with_history = run_erase_coverage(topo, routes, CoverageMode::history, 42 + t);
    Metrics with_flood = run_erase_coverage(topo, routes, CoverageMode::flood, 42 + t);

    if (with_history.erases.empty()) return false;
    if (with_history.erases.size() != with_flood.erases.size()) return false;

    std::vector<NodeId> ids = topo.router_ids();
    std::set<NodeId> all_routers(ids.begin(), ids.end());

    for (std::size_t i = 0; i < with_history.erases.size(); ++i) {
      const EraseRecord& h = with_history.erases[i];
      const EraseRecord& f = with_flood.erases[i];
      if (h.name != f.name) return false;
      if (h.cached_at_issue != f.cached_at_issue) return false;
      if (!check_flood_reach) {
        // Same deletion coverage without flooding, and full penetration.
        if (h.deleted_at != f.deleted_at) return false;
        if (h.deleted_at != h.cached_at_issue) return false;
      } else {
        // Every holder is reached even when in-cache routing short-circuits
        // the flood.
        for (NodeId holder : f.cached_at_issue) {
          if (!f.received.contains(holder)) return false;
        }
      }
      if (!h.cached_at_issue.empty()) ++nonvacuous;
    }

    if (check_flood_reach) {
      // With nothing cached in-network every hop falls through to controlled
      // flooding, which must span the entire router set.
      Metrics pure = run_erase_coverage(topo, routes, CoverageMode::pure_flood, 42 + t);
      if (pure.erases.empty()) return false;
      for (const EraseRecord& e : pure.erases) {
        if (!e.cached_at_issue.empty()) return false;
        if (e.received != all_routers) return false;
      }
    }
  }
  return nonvacuous >= 10;
}

// ---------------------------------------------------------------------------
// 6. Forged erases die at the first router with auth failures; nothing is
//    deleted and nothing propagates.
// ---------------------------------------------------------------------------

bool check_forged() {
  ResolvedScenario rs = resolve_scenario(parse_scenario_file(dir() + "/adversary.scn"));
  Simulator sim(rs.topo, rs.routes, rs.params);
  Metrics m = sim.run();

  std::uint64_t auth = 0, deletions = 0;
  for (const auto& [id, c] : m.router_counters) {
    auth += c.auth_failures;
    deletions += c.deletions;
  }
  if (auth != 1000 || deletions != 0) return false;
  if (m.router_counters.at(0).auth_failures != 1000) return false;

  std::size_t forged = 0;
  for (const auto& e : m.erases) {
    if (!e.forged) return false;
    if (!e.deleted_at.empty()) return false;
    ++forged;
  }
  if (forged != 1000) return false;
  if (m.totals().out_erase != 0) return false;
  // The target must still be cached where the forgeries landed.
  if (sim.router(0).cs().peek(rs.params.adversary.target) == nullptr) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 7. Deletion byte overhead on ISP-scale layouts: under 5% of content
//    traffic on both, and lower on the longer-path continental layout.
// ---------------------------------------------------------------------------

double overhead_ratio(const std::string& scn, std::uint64_t* deletions_out) {
  ResolvedScenario rs = resolve_scenario(parse_scenario_file(dir() + "/" + scn));
  Simulator sim(rs.topo, rs.routes, rs.params);
  Metrics m = sim.run();
  NodeTraffic t = m.totals();
  std::uint64_t deletions = 0;
  for (const auto& [id, c] : m.router_counters) deletions += c.deletions;
  *deletions_out = deletions;
  if (t.out_data == 0) return 1e9;
  return static_cast<double>(t.out_erase) / static_cast<double>(t.out_data);
}

bool check_isp_overhead() {
  std::uint64_t dfn_deletions = 0, att_deletions = 0;
  double dfn = overhead_ratio("dfn30.scn", &dfn_deletions);
  double att = overhead_ratio("att134.scn", &att_deletions);
  std::printf("       erase/content bytes: dfn30 %.4f, att134 %.4f "
              "(deletions %llu / %llu)\n",
              dfn, att, static_cast<unsigned long long>(dfn_deletions),
              static_cast<unsigned long long>(att_deletions));
  if (dfn_deletions == 0 || att_deletions == 0) return false;
  return dfn < 0.05 && att < 0.05 && att < dfn;
}

// ---------------------------------------------------------------------------
// 8. Property sweep: filter behaviour, history equivalence, trace MAC
//    tampering, longest-prefix match, deterministic replay.
// ---------------------------------------------------------------------------

bool property_bloom_no_false_negatives() {
  BloomHistory f(std::size_t{1} << 20, 7, 0.0);
  Rng rng(1);
  std::vector<Digest> members;
  members.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    members.push_back(rand_digest(rng));
    f.insert(members.back(), 0);
  }
  for (const Digest& d : members) {
    if (!f.query(d)) return false;
  }
  return true;
}

bool property_bloom_fp_calibrated() {
  Rng rng(2);
  for (std::size_t ratio : {4u, 8u, 16u}) {
    const std::size_t m = std::size_t{1} << 17;
    const std::size_t n = m / ratio;
    BloomHistory f(m, optimal_k(static_cast<double>(m), static_cast<double>(n)), 0.0);
    for (std::size_t i = 0; i < n; ++i) f.insert(rand_digest(rng), 0);
    std::size_t hits = 0;
    const std::size_t probes = 200000;
    for (std::size_t i = 0; i < probes; ++i) {
      if (f.query(rand_digest(rng))) ++hits;
    }
    double predicted = false_positive_rate(static_cast<double>(m), static_cast<double>(n));
    double empirical = static_cast<double>(hits) / static_cast<double>(probes);
    if (empirical > predicted * 3.0 || empirical < predicted / 3.0) return false;
  }
  return true;
}

bool property_lossless_matches_set() {
  LosslessHistory h(0, 12, seconds(1e9));
  std::unordered_set<Digest, DigestHash> oracle;
  Rng rng(3);
  std::vector<Digest> pool;
  for (int op = 0; op < 20000; ++op) {
    if (pool.empty() || rng.bernoulli(0.7)) {
      Digest d = rand_digest(rng);
      h.insert(d, seconds(op * 0.001));
      oracle.insert(d);
      pool.push_back(d);
    } else {
      const Digest& member = pool[static_cast<std::size_t>(rng.uniform_u64(pool.size()))];
      if (!h.query(member)) return false;
      if (h.query(rand_digest(rng)) != false) return false;
    }
  }
  return h.entry_count() == oracle.size();
}

bool property_trace_mac_tamper_detected() {
  Rng rng(9);
  Interest interest;
  interest.name = Name::parse("/movies/night/7");
  std::vector<MarkingKey> keys;
  for (NodeId r = 1; r <= 3; ++r) {
    keys.push_back(generate_marking_key(rng));
    append_trace(interest, r, static_cast<FaceId>(r), keys.back());
  }

  EraseMessage pristine;
  pristine.name = interest.name;
  pristine.trace = interest.trace;  // head is router 3, the last marker

  for (std::size_t b = 0; b < TraceTuple::kWireSize; ++b) {
    EraseMessage tampered = pristine;
    auto wire = tampered.trace.front().serialize();
    wire[b] ^= 0xFF;
    tampered.trace.front() = TraceTuple::deserialize(wire);
    PopResult r = pop_and_verify(tampered, 3, keys[2]);
    PopStatus expected = b < 4 ? PopStatus::wrong_router : PopStatus::tag_mismatch;
    if (r.status != expected) return false;
    if (tampered.trace.size() != 3) return false;  // failure must not consume
  }
  {
    EraseMessage renamed = pristine;
    renamed.name = Name::parse("/movies/day/7");
    if (pop_and_verify(renamed, 3, keys[2]).status != PopStatus::tag_mismatch) return false;
  }
  {
    EraseMessage msg = pristine;
    if (pop_and_verify(msg, 3, keys[0]).status != PopStatus::tag_mismatch) return false;
  }

  EraseMessage msg = pristine;
  for (NodeId r = 3; r >= 1; --r) {
    PopResult res = pop_and_verify(msg, r, keys[r - 1]);
    if (res.status != PopStatus::ok || res.face_id != r) return false;
  }
  return pop_and_verify(msg, 1, keys[0]).status == PopStatus::no_trace;
}

Name random_name(Rng& rng, std::size_t max_depth) {
  static const char* kParts[] = {"a", "b", "c"};
  std::size_t depth = 1 + rng.uniform_u64(max_depth);
  Name n;
  for (std::size_t i = 0; i < depth; ++i) {
    n = n.appended(kParts[rng.uniform_u64(3)]);
  }
  return n;
}

bool property_lpm_matches_bruteforce() {
  FibTable fib;
  std::map<Name, std::set<FaceId>> oracle;
  Rng rng(4);
  for (int i = 0; i < 300; ++i) {
    Name prefix = random_name(rng, 4);
    FaceId face = static_cast<FaceId>(rng.uniform_u64(16));
    fib.add_route(prefix, face);
    oracle[prefix].insert(face);
  }
  for (int q = 0; q < 10000; ++q) {
    Name name = random_name(rng, 5);
    const std::set<FaceId>* best = nullptr;
    for (std::size_t len = name.size() + 1; len-- > 0;) {
      auto it = oracle.find(name.prefix(len));
      if (it != oracle.end()) {
        best = &it->second;
        break;
      }
    }
    const std::set<FaceId>* got = fib.lpm(name);
    if (best == nullptr) {
      if (got != nullptr) return false;
      if (!fib.lpm_faces(name).empty()) return false;
    } else {
      if (got == nullptr || *got != *best) return false;
    }
  }
  return true;
}

std::string run_csvs(std::uint64_t seed) {
  ResolvedScenario rs = resolve_scenario(parse_scenario_file(dir() + "/line3.scn"), seed);
  Simulator sim(rs.topo, rs.routes, rs.params);
  Metrics m = sim.run();
  std::ostringstream out;
  write_metrics_csv(m, out);
  out << '\x1e';
  write_erases_csv(m, out);
  return out.str();
}

bool property_deterministic_replay() {
  std::string a = run_csvs(7);
  std::string b = run_csvs(7);
  std::string c = run_csvs(8);
  return a == b && a != c;
}

bool check_properties() {
  return property_bloom_no_false_negatives() && property_bloom_fp_calibrated() &&
         property_lossless_matches_set() && property_trace_mac_tamper_detected() &&
         property_lpm_matches_bruteforce() && property_deterministic_replay();
}

}  // namespace

int main() {
  report(1, check_saturation(), "store saturation times match the worked figures");
  report(2, check_filter_tuning(), "filter hash count and false-positive rate at 4GiB/2e8");
  report(3, check_marking_sizes(), "trace tuples are 38 B and aggregate volumes match");
  report(4, check_coverage_pair(false), "history-routed erases cover the flooding deletion set");
  report(5, check_coverage_pair(true), "flooded erases reach every router including all holders");
  report(6, check_forged(), "forged erases fail authentication and delete nothing");
  report(7, check_isp_overhead(), "erase byte overhead under 5% and lower on the larger ISP map");
  report(8, check_properties(), "filter/history/MAC/LPM/replay property sweep");
  return failures;
}
