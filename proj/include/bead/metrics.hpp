#pragma once

#include <cstdint>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "bead/forwarder.hpp"
#include "bead/messages.hpp"
#include "bead/name.hpp"

namespace bead {

// Per-node byte counters over network faces (local agent faces are not
// network traffic). Names follow the InData/OutData/InErase/OutErase
// reporting convention.
struct NodeTraffic {
  std::uint64_t in_interest = 0, out_interest = 0;
  std::uint64_t in_data = 0, out_data = 0;
  std::uint64_t in_erase = 0, out_erase = 0;
  std::uint64_t in_nack = 0, out_nack = 0;

  void add_in(MessageClass c, std::uint64_t bytes) {
    switch (c) {
      case MessageClass::interest: in_interest += bytes; break;
      case MessageClass::data: in_data += bytes; break;
      case MessageClass::erase: in_erase += bytes; break;
      case MessageClass::nack: in_nack += bytes; break;
    }
  }
  void add_out(MessageClass c, std::uint64_t bytes) {
    switch (c) {
      case MessageClass::interest: out_interest += bytes; break;
      case MessageClass::data: out_data += bytes; break;
      case MessageClass::erase: out_erase += bytes; break;
      case MessageClass::nack: out_nack += bytes; break;
    }
  }
};

// Record of one erase issuance (producer or adversary). `deleted_at` collects
// every router that deleted the target while this erase propagated; in
// drained scenarios (nothing in flight at issue) it is a subset of
// `cached_at_issue`.
using EraseId = std::uint32_t;

struct EraseRecord {
  EraseId id = 0;
  Name name;
  std::string digest_hex;
  SimTime issued_at = 0;
  bool forged = false;
  std::size_t trace_tuples = 0;
  std::set<NodeId> cached_at_issue;  // role-router nodes caching the target
  std::set<NodeId> received;         // role-router nodes the erase reached
  std::set<NodeId> deleted_at;       // role-router nodes that deleted it
};

// Host wall-clock cost of on_erase calls; host-dependent, reported apart
// from the deterministic metrics.
struct ProcTiming {
  std::uint64_t count = 0;
  double total_ms = 0.0;
  double max_ms = 0.0;

  void add(double ms) {
    ++count;
    total_ms += ms;
    if (ms > max_ms) max_ms = ms;
  }
  double mean_ms() const { return count == 0 ? 0.0 : total_ms / static_cast<double>(count); }
};

// Consumer-side interest bookkeeping: every issued interest ends the run
// satisfied, NACKed, or still pending — the three must sum to issued.
struct InterestLedger {
  std::uint64_t issued = 0;
  std::uint64_t satisfied = 0;
  std::uint64_t nacked = 0;
  std::uint64_t pending_at_end = 0;
  std::uint64_t spurious = 0;  // responses with no matching pending interest
};

struct Metrics {
  std::map<NodeId, NodeTraffic> traffic;
  std::map<NodeId, RouterCounters> router_counters;
  std::map<NodeId, InterestLedger> interests;

  // Directed link accounting keyed by the sender's (node, face).
  std::map<std::pair<NodeId, FaceId>, std::uint64_t> link_sent;
  std::map<std::pair<NodeId, FaceId>, std::uint64_t> link_received;
  std::map<std::pair<NodeId, FaceId>, std::uint64_t> link_in_flight;

  std::vector<EraseRecord> erases;
  std::map<NodeId, ProcTiming> timings;

  std::uint64_t events_executed = 0;
  SimTime end_time = 0;

  NodeTraffic totals() const {
    NodeTraffic t;
    for (const auto& [id, n] : traffic) {
      t.in_interest += n.in_interest;
      t.out_interest += n.out_interest;
      t.in_data += n.in_data;
      t.out_data += n.out_data;
      t.in_erase += n.in_erase;
      t.out_erase += n.out_erase;
      t.in_nack += n.in_nack;
      t.out_nack += n.out_nack;
    }
    return t;
  }

  // |routers that deleted| / |routers caching at issue|; vacuously 1 when
  // nothing held the content.
  double penetration(EraseId id) const {
    for (const auto& e : erases) {
      if (e.id == id) {
        if (e.cached_at_issue.empty()) return 1.0;
        return static_cast<double>(e.deleted_at.size()) /
               static_cast<double>(e.cached_at_issue.size());
      }
    }
    throw std::out_of_range("unknown erase id");
  }

  // Mean on_erase wall-clock per router, only for routers that saw erases.
  std::map<NodeId, double> measure_erase_processing() const {
    std::map<NodeId, double> out;
    for (const auto& [id, t] : timings) {
      if (t.count > 0) out[id] = t.mean_ms();
    }
    return out;
  }
};

// ---------------------------------------------------------------------------
// Export. All deterministic outputs format numbers without locale influence;
// rows are emitted in sorted key order so identical runs produce identical
// bytes.
// ---------------------------------------------------------------------------

inline std::string format_double(double v) {
  std::ostringstream os;
  os.imbue(std::locale::classic());
  os << std::fixed << std::setprecision(6) << v;
  return os.str();
}

inline void write_metrics_csv(const Metrics& m, std::ostream& out) {
  out << "node_id,metric,value,unit\n";
  auto row = [&out](const std::string& node, const char* metric, std::uint64_t value,
                    const char* unit) {
    out << node << ',' << metric << ',' << value << ',' << unit << '\n';
  };
  for (const auto& [id, t] : m.traffic) {
    std::string n = std::to_string(id);
    row(n, "InData", t.in_data, "B");
    row(n, "InErase", t.in_erase, "B");
    row(n, "InInterest", t.in_interest, "B");
    row(n, "InNack", t.in_nack, "B");
    row(n, "OutData", t.out_data, "B");
    row(n, "OutErase", t.out_erase, "B");
    row(n, "OutInterest", t.out_interest, "B");
    row(n, "OutNack", t.out_nack, "B");
  }
  for (const auto& [id, c] : m.router_counters) {
    std::string n = std::to_string(id);
    row(n, "AuthFailures", c.auth_failures, "count");
    row(n, "CacheHits", c.cache_hits, "count");
    row(n, "CollapsedInterests", c.collapsed_interests, "count");
    row(n, "Deletions", c.deletions, "count");
    row(n, "DuplicateErases", c.duplicate_erases, "count");
    row(n, "ErasesIn", c.erases_in, "count");
    row(n, "NoRouteDrops", c.no_route_drops, "count");
    row(n, "UnsolicitedDrops", c.unsolicited_drops, "count");
  }
  for (const auto& [id, l] : m.interests) {
    std::string n = std::to_string(id);
    row(n, "InterestsIssued", l.issued, "count");
    row(n, "InterestsNacked", l.nacked, "count");
    row(n, "InterestsPending", l.pending_at_end, "count");
    row(n, "InterestsSatisfied", l.satisfied, "count");
  }
  NodeTraffic t = m.totals();
  row("total", "InData", t.in_data, "B");
  row("total", "InErase", t.in_erase, "B");
  row("total", "InInterest", t.in_interest, "B");
  row("total", "InNack", t.in_nack, "B");
  row("total", "OutData", t.out_data, "B");
  row("total", "OutErase", t.out_erase, "B");
  row("total", "OutInterest", t.out_interest, "B");
  row("total", "OutNack", t.out_nack, "B");
}

inline void write_erases_csv(const Metrics& m, std::ostream& out) {
  out << "erase_id,name,digest,issued_s,forged,trace_tuples,cached_at_issue,received,"
         "deleted,penetration\n";
  for (const auto& e : m.erases) {
    double pen = e.cached_at_issue.empty()
                     ? 1.0
                     : static_cast<double>(e.deleted_at.size()) /
                           static_cast<double>(e.cached_at_issue.size());
    out << e.id << ',' << e.name.to_uri() << ',' << e.digest_hex << ','
        << format_double(to_seconds(e.issued_at)) << ',' << (e.forged ? 1 : 0) << ','
        << e.trace_tuples << ',' << e.cached_at_issue.size() << ',' << e.received.size()
        << ',' << e.deleted_at.size() << ',' << format_double(pen) << '\n';
  }
}

inline void write_timings_csv(const Metrics& m, std::ostream& out) {
  out << "# host-dependent wall-clock measurements; excluded from determinism guarantees\n";
  out << "node_id,erases_processed,mean_ms,max_ms\n";
  for (const auto& [id, t] : m.timings) {
    if (t.count == 0) continue;
    out << id << ',' << t.count << ',' << format_double(t.mean_ms()) << ','
        << format_double(t.max_ms) << '\n';
  }
}

}  // namespace bead
