#pragma once

#include <cstdint>
#include <optional>
#include <vector>

namespace hpcids {

struct CacheGeometry {
  std::uint32_t capacity = 32 * 1024;  // bytes
  std::uint32_t associativity = 2;
  std::uint32_t line_size = 64;  // bytes

  std::uint32_t num_sets() const { return capacity / (associativity * line_size); }
};

// Throws InvalidArgument unless capacity is a multiple of ways * line size
// and the line size and set count are powers of two.
void validate(const CacheGeometry& geometry);

struct CacheConfig {
  CacheGeometry l1i{32 * 1024, 2, 64};
  CacheGeometry l1d{32 * 1024, 2, 64};
  CacheGeometry l2{512 * 1024, 8, 64};
};

void validate(const CacheConfig& config);

// One set-associative level with true LRU replacement and allocate-on-miss
// for both reads and writes.
class CacheLevel {
 public:
  explicit CacheLevel(const CacheGeometry& geometry);

  // Looks up the line holding addr, updates LRU order and fills on a miss.
  // Returns true on hit.
  bool access(std::uint64_t addr);

  bool contains(std::uint64_t addr) const;

  const CacheGeometry& geometry() const { return geometry_; }

 private:
  static constexpr std::uint64_t kInvalid = ~std::uint64_t{0};

  CacheGeometry geometry_;
  std::uint32_t offset_bits_ = 0;
  std::uint64_t set_mask_ = 0;
  // Per set, ways ordered most- to least-recently used.
  std::vector<std::uint64_t> lines_;
};

enum class AccessKind : std::uint8_t { InstFetch, Load, Store };

struct AccessOutcome {
  bool l1_hit = false;
  std::optional<bool> l2_hit;  // empty when L1 hit and L2 was not probed
};

// Raw event tallies; counters.hpp maps them onto the gem5 event names.
struct EventCounts {
  std::uint64_t insts = 0;
  std::uint64_t branches = 0;
  std::uint64_t icache_hits = 0;
  std::uint64_t icache_misses = 0;
  std::uint64_t dcache_read_hits = 0;
  std::uint64_t dcache_read_misses = 0;
  std::uint64_t dcache_write_hits = 0;
  std::uint64_t dcache_write_misses = 0;
  std::uint64_t l2_inst_hits = 0;
  std::uint64_t l2_inst_misses = 0;
  std::uint64_t l2_data_hits = 0;
  std::uint64_t l2_data_misses = 0;

  EventCounts& operator+=(const EventCounts& o);
  EventCounts operator-(const EventCounts& o) const;
  bool operator==(const EventCounts&) const = default;
};

// L1I + L1D backed by a unified L2. L1 misses probe L2; L2 misses fill both
// levels. No write-back traffic or back-invalidation is modeled.
class CacheHierarchy {
 public:
  explicit CacheHierarchy(const CacheConfig& config);

  AccessOutcome access(std::uint64_t addr, AccessKind kind);

  const EventCounts& counts() const { return counts_; }
  EventCounts& counts() { return counts_; }

 private:
  CacheLevel l1i_;
  CacheLevel l1d_;
  CacheLevel l2_;
  EventCounts counts_;
};

}  // namespace hpcids
