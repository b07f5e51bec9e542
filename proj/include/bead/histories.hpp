#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <memory>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

#include "bead/hash.hpp"
#include "bead/messages.hpp"
#include "bead/rng.hpp"

namespace bead {

// ---------------------------------------------------------------------------
// Analytical calculators (filter sizing and saturation estimates).
// ---------------------------------------------------------------------------

// k = round(ln2 * m/n), clamped to [1, k_max].
inline std::size_t optimal_k(double m_bits, double n_elements, std::size_t k_max = 256) {
  if (m_bits <= 0 || n_elements <= 0) {
    throw std::invalid_argument("optimal_k: m and n must be positive");
  }
  if (k_max < 1) throw std::invalid_argument("optimal_k: k_max must be >= 1");
  double k = std::round(std::log(2.0) * m_bits / n_elements);
  if (k < 1) return 1;
  if (k > static_cast<double>(k_max)) return k_max;
  return static_cast<std::size_t>(k);
}

// False-positive probability of an optimally tuned filter: 0.6185^(m/n).
inline double false_positive_rate(double m_bits, double n_elements) {
  if (m_bits <= 0 || n_elements <= 0) {
    throw std::invalid_argument("false_positive_rate: m and n must be positive");
  }
  return std::pow(0.6185, m_bits / n_elements);
}

// Seconds until a lossless history of the given capacity fills at `rate`
// inserts per second.
inline double saturation_time(double capacity_entries, double rate_per_second) {
  if (rate_per_second <= 0) {
    throw std::invalid_argument("saturation_time: rate must be positive");
  }
  if (capacity_entries < 0) {
    throw std::invalid_argument("saturation_time: capacity must be non-negative");
  }
  return capacity_entries / rate_per_second;
}

// Worst-case seconds until a Bloom filter has every bit set: each insert
// flips k fresh bits, so m/k inserts suffice.
inline double bloom_saturation_time(double m_bits, double k, double rate_per_second) {
  if (m_bits <= 0) throw std::invalid_argument("bloom_saturation_time: m must be positive");
  if (k < 1) throw std::invalid_argument("bloom_saturation_time: k must be >= 1");
  if (rate_per_second <= 0) {
    throw std::invalid_argument("bloom_saturation_time: rate must be positive");
  }
  return (m_bits / k) / rate_per_second;
}

// ---------------------------------------------------------------------------
// Per-interface forwarder histories.
// ---------------------------------------------------------------------------

// Records digests of content forwarded on one interface; queried to decide
// whether an erase should follow the same interface downstream.
class ForwarderHistory {
 public:
  virtual ~ForwarderHistory() = default;

  virtual void insert(const Digest& d, SimTime now) = 0;
  virtual bool query(const Digest& d) const = 0;

  // Stored entries (exact for lossless, insert count since reset for filters).
  virtual std::size_t entry_count() const = 0;
  // Fill fraction of the backing store, in [0, 1]; 0 when unbounded.
  virtual double occupancy() const = 0;
  // Chunk evictions (lossless) or flushes (Bloom) so far.
  virtual std::size_t reset_count() const { return 0; }
  // Time-driven maintenance; only the counting filter does anything here.
  virtual void advance(SimTime /*now*/, Rng& /*rng*/) {}
};

// Exact membership over a rolling train of chunks. A new chunk opens when the
// configured window elapses; eviction always drops the oldest chunk whole,
// either because the chunk train grew past chunk_count or because the total
// entry count would exceed capacity.
class LosslessHistory final : public ForwarderHistory {
 public:
  LosslessHistory(std::size_t capacity_entries, std::size_t chunk_count, SimTime chunk_window)
      : capacity_(capacity_entries), chunk_count_(std::max<std::size_t>(1, chunk_count)),
        window_(chunk_window) {}

  void insert(const Digest& d, SimTime now) override {
    rotate(now);
    while (capacity_ > 0 && count_ + 1 > capacity_ && !chunks_.empty()) {
      evict_oldest();
    }
    if (chunks_.empty()) chunks_.push_back(Chunk{now, {}});
    auto [it, fresh] = chunks_.back().digests.insert(d);
    if (fresh) ++count_;
  }

  bool query(const Digest& d) const override {
    for (const auto& c : chunks_) {
      if (c.digests.contains(d)) return true;
    }
    return false;
  }

  std::size_t entry_count() const override { return count_; }

  double occupancy() const override {
    return capacity_ == 0 ? 0.0
                          : static_cast<double>(count_) / static_cast<double>(capacity_);
  }

  std::size_t reset_count() const override { return evictions_; }

 private:
  struct Chunk {
    SimTime opened_at = 0;
    std::unordered_set<Digest, DigestHash> digests;
  };

  void rotate(SimTime now) {
    if (window_ <= 0) {
      if (chunks_.empty()) chunks_.push_back(Chunk{now, {}});
      return;
    }
    if (chunks_.empty() || now - chunks_.back().opened_at >= window_) {
      chunks_.push_back(Chunk{now, {}});
      while (chunks_.size() > chunk_count_) evict_oldest();
    }
  }

  void evict_oldest() {
    count_ -= chunks_.front().digests.size();
    chunks_.pop_front();
    ++evictions_;
  }

  std::size_t capacity_;  // 0 = unbounded
  std::size_t chunk_count_;
  SimTime window_;
  std::deque<Chunk> chunks_;
  std::size_t count_ = 0;
  std::size_t evictions_ = 0;
};

// Derives the i-th filter index from a digest by double hashing; the digest
// is already cryptographic, so no further hashing of the content is needed.
inline std::size_t filter_index(const Digest& d, std::size_t i, std::size_t m) {
  std::uint64_t h1 = d.word(0);
  std::uint64_t h2 = d.word(1) | 1;  // odd stride so the probe walks all of m
  return static_cast<std::size_t>((h1 + static_cast<std::uint64_t>(i) * h2) % m);
}

// Classic Bloom filter: no false negatives until a flush. Flushes itself when
// the set-bit fraction passes the reset threshold.
class BloomHistory final : public ForwarderHistory {
 public:
  BloomHistory(std::size_t m_bits, std::size_t k, double reset_threshold = 0.5)
      : m_(m_bits), k_(k), threshold_(reset_threshold), bits_(m_bits, false) {
    if (m_ == 0) throw std::invalid_argument("BloomHistory: m must be positive");
    if (k_ == 0) throw std::invalid_argument("BloomHistory: k must be >= 1");
  }

  void insert(const Digest& d, SimTime) override {
    for (std::size_t i = 0; i < k_; ++i) {
      std::size_t idx = filter_index(d, i, m_);
      if (!bits_[idx]) {
        bits_[idx] = true;
        ++set_bits_;
      }
    }
    ++inserted_;
    if (threshold_ > 0 && occupancy() > threshold_) flush();
  }

  bool query(const Digest& d) const override {
    for (std::size_t i = 0; i < k_; ++i) {
      if (!bits_[filter_index(d, i, m_)]) return false;
    }
    return true;
  }

  std::size_t entry_count() const override { return inserted_; }

  double occupancy() const override {
    return static_cast<double>(set_bits_) / static_cast<double>(m_);
  }

  std::size_t reset_count() const override { return flushes_; }

  std::size_t k() const { return k_; }
  std::size_t m() const { return m_; }

 private:
  void flush() {
    std::fill(bits_.begin(), bits_.end(), false);
    set_bits_ = 0;
    inserted_ = 0;
    ++flushes_;
  }

  std::size_t m_;
  std::size_t k_;
  double threshold_;
  std::vector<bool> bits_;
  std::size_t set_bits_ = 0;
  std::size_t inserted_ = 0;
  std::size_t flushes_ = 0;
};

// Counting Bloom filter with 4-bit saturating counters. Ages out entries by
// decrementing randomly chosen counters at a rate tied to the mean content
// lifetime, which introduces the documented false-negative risk.
class CountingBloomHistory final : public ForwarderHistory {
 public:
  CountingBloomHistory(std::size_t m_counters, std::size_t k, SimTime mean_expiry)
      : m_(m_counters), k_(k), mean_expiry_(mean_expiry), counters_(m_counters, 0) {
    if (m_ == 0) throw std::invalid_argument("CountingBloomHistory: m must be positive");
    if (k_ == 0) throw std::invalid_argument("CountingBloomHistory: k must be >= 1");
  }

  void insert(const Digest& d, SimTime now) override {
    touch_clock(now);
    for (std::size_t i = 0; i < k_; ++i) {
      std::uint8_t& c = counters_[filter_index(d, i, m_)];
      if (c == 0) ++nonzero_;
      if (c < kMaxCount) ++c;
    }
    ++inserted_;
  }

  bool query(const Digest& d) const override {
    for (std::size_t i = 0; i < k_; ++i) {
      if (counters_[filter_index(d, i, m_)] == 0) return false;
    }
    return true;
  }

  std::size_t entry_count() const override { return inserted_; }

  double occupancy() const override {
    return static_cast<double>(nonzero_) / static_cast<double>(m_);
  }

  // Applies the decrements accrued since the last call: the decrement rate is
  // occupancy / mean_expiry counters per second, targets drawn uniformly.
  void advance(SimTime now, Rng& rng) override {
    touch_clock(now);
    if (mean_expiry_ <= 0 || nonzero_ == 0) {
      last_advance_ = now;
      return;
    }
    double elapsed_s = to_seconds(now - last_advance_);
    if (elapsed_s <= 0) return;
    last_advance_ = now;
    double rate = (static_cast<double>(nonzero_) / static_cast<double>(m_)) *
                  (static_cast<double>(m_) / to_seconds(mean_expiry_));
    pending_ += elapsed_s * rate;
    while (pending_ >= 1.0) {
      pending_ -= 1.0;
      std::uint8_t& c = counters_[rng.uniform_u64(m_)];
      if (c > 0 && --c == 0) --nonzero_;
    }
  }

 private:
  static constexpr std::uint8_t kMaxCount = 15;

  void touch_clock(SimTime now) {
    if (!clock_started_) {
      clock_started_ = true;
      last_advance_ = now;
    }
  }

  std::size_t m_;
  std::size_t k_;
  SimTime mean_expiry_;
  std::vector<std::uint8_t> counters_;
  std::size_t nonzero_ = 0;
  std::size_t inserted_ = 0;
  bool clock_started_ = false;
  SimTime last_advance_ = 0;
  double pending_ = 0.0;
};

// ---------------------------------------------------------------------------
// Configuration and factory.
// ---------------------------------------------------------------------------

enum class HistoryType { none, lossless, bloom, cbf };

inline HistoryType parse_history_type(const std::string& s) {
  if (s == "none") return HistoryType::none;
  if (s == "lossless") return HistoryType::lossless;
  if (s == "bloom") return HistoryType::bloom;
  if (s == "cbf") return HistoryType::cbf;
  throw std::invalid_argument("unknown history type: " + s);
}

struct HistoryConfig {
  HistoryType type = HistoryType::none;
  std::size_t m_bits = 1u << 20;          // bloom/cbf store size
  std::size_t capacity_entries = 0;       // lossless; 0 = unbounded
  std::size_t k = 0;                      // 0 = auto from expected_entries
  std::size_t expected_entries = 0;       // n used when k is auto
  std::size_t k_max = 256;
  std::size_t chunk_count = 12;
  double chunk_window_s = 60.0;
  double reset_threshold = 0.5;
  double mean_expiry_s = 0.0;             // cbf decay; <= 0 disables
};

inline std::size_t resolve_k(const HistoryConfig& cfg) {
  if (cfg.k > 0) return cfg.k;
  if (cfg.expected_entries == 0) {
    throw std::invalid_argument("history k = auto requires expected_entries");
  }
  return optimal_k(static_cast<double>(cfg.m_bits),
                   static_cast<double>(cfg.expected_entries), cfg.k_max);
}

// Returns nullptr for type none: the owning interface keeps no history.
inline std::unique_ptr<ForwarderHistory> make_history(const HistoryConfig& cfg) {
  switch (cfg.type) {
    case HistoryType::none:
      return nullptr;
    case HistoryType::lossless:
      return std::make_unique<LosslessHistory>(cfg.capacity_entries, cfg.chunk_count,
                                               seconds(cfg.chunk_window_s));
    case HistoryType::bloom:
      return std::make_unique<BloomHistory>(cfg.m_bits, resolve_k(cfg), cfg.reset_threshold);
    case HistoryType::cbf:
      return std::make_unique<CountingBloomHistory>(cfg.m_bits, resolve_k(cfg),
                                                    seconds(cfg.mean_expiry_s));
  }
  throw std::logic_error("unreachable history type");
}

}  // namespace bead
