#include "hpcids/cache.hpp"

#include <algorithm>
#include <bit>

#include <fmt/format.h>

#include "hpcids/error.hpp"

namespace hpcids {

void validate(const CacheGeometry& g) {
  if (g.line_size == 0 || !std::has_single_bit(g.line_size))
    throw Error(ErrorKind::InvalidArgument, fmt::format("line size {} is not a power of two", g.line_size));
  if (g.associativity == 0 || g.capacity == 0 || g.capacity % (g.associativity * g.line_size) != 0)
    throw Error(ErrorKind::InvalidArgument,
                fmt::format("capacity {} not divisible by {} ways x {} bytes", g.capacity, g.associativity,
                            g.line_size));
}

void validate(const CacheConfig& config) {
  validate(config.l1i);
  validate(config.l1d);
  validate(config.l2);
}

CacheLevel::CacheLevel(const CacheGeometry& geometry) : geometry_(geometry) {
  validate(geometry_);
  offset_bits_ = static_cast<std::uint32_t>(std::countr_zero(geometry_.line_size));
  lines_.assign(static_cast<std::size_t>(geometry_.num_sets()) * geometry_.associativity, kInvalid);
}

bool CacheLevel::access(std::uint64_t addr) {
  const std::uint64_t line = addr >> offset_bits_;
  const auto ways = geometry_.associativity;
  auto* set = lines_.data() + (line % geometry_.num_sets()) * ways;

  std::uint32_t way = 0;
  while (way < ways && set[way] != line) ++way;
  const bool hit = way < ways;
  // On a miss the LRU way (last slot) is the victim.
  if (!hit) way = ways - 1;
  std::move_backward(set, set + way, set + way + 1);
  set[0] = line;
  return hit;
}

bool CacheLevel::contains(std::uint64_t addr) const {
  const std::uint64_t line = addr >> offset_bits_;
  const auto ways = geometry_.associativity;
  const auto* set = lines_.data() + (line % geometry_.num_sets()) * ways;
  return std::find(set, set + ways, line) != set + ways;
}

EventCounts& EventCounts::operator+=(const EventCounts& o) {
  insts += o.insts;
  branches += o.branches;
  icache_hits += o.icache_hits;
  icache_misses += o.icache_misses;
  dcache_read_hits += o.dcache_read_hits;
  dcache_read_misses += o.dcache_read_misses;
  dcache_write_hits += o.dcache_write_hits;
  dcache_write_misses += o.dcache_write_misses;
  l2_inst_hits += o.l2_inst_hits;
  l2_inst_misses += o.l2_inst_misses;
  l2_data_hits += o.l2_data_hits;
  l2_data_misses += o.l2_data_misses;
  return *this;
}

EventCounts EventCounts::operator-(const EventCounts& o) const {
  EventCounts d;
  d.insts = insts - o.insts;
  d.branches = branches - o.branches;
  d.icache_hits = icache_hits - o.icache_hits;
  d.icache_misses = icache_misses - o.icache_misses;
  d.dcache_read_hits = dcache_read_hits - o.dcache_read_hits;
  d.dcache_read_misses = dcache_read_misses - o.dcache_read_misses;
  d.dcache_write_hits = dcache_write_hits - o.dcache_write_hits;
  d.dcache_write_misses = dcache_write_misses - o.dcache_write_misses;
  d.l2_inst_hits = l2_inst_hits - o.l2_inst_hits;
  d.l2_inst_misses = l2_inst_misses - o.l2_inst_misses;
  d.l2_data_hits = l2_data_hits - o.l2_data_hits;
  d.l2_data_misses = l2_data_misses - o.l2_data_misses;
  return d;
}

CacheHierarchy::CacheHierarchy(const CacheConfig& config)
    : l1i_(config.l1i), l1d_(config.l1d), l2_(config.l2) {}

AccessOutcome CacheHierarchy::access(std::uint64_t addr, AccessKind kind) {
  const bool inst = kind == AccessKind::InstFetch;
  AccessOutcome out;
  out.l1_hit = inst ? l1i_.access(addr) : l1d_.access(addr);

  switch (kind) {
    case AccessKind::InstFetch: ++(out.l1_hit ? counts_.icache_hits : counts_.icache_misses); break;
    case AccessKind::Load: ++(out.l1_hit ? counts_.dcache_read_hits : counts_.dcache_read_misses); break;
    case AccessKind::Store: ++(out.l1_hit ? counts_.dcache_write_hits : counts_.dcache_write_misses); break;
  }
  if (out.l1_hit) return out;

  out.l2_hit = l2_.access(addr);
  if (inst)
    ++(*out.l2_hit ? counts_.l2_inst_hits : counts_.l2_inst_misses);
  else
    ++(*out.l2_hit ? counts_.l2_data_hits : counts_.l2_data_misses);
  return out;
}

}  // namespace hpcids
