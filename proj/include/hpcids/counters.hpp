#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hpcids/cache.hpp"
#include "hpcids/error.hpp"

namespace hpcids {

// The sixteen gem5 events used as HPC stand-ins, verbatim.
inline constexpr std::array<std::string_view, 16> kSelectedEvents = {
    "system.cpu.commitStats0.numInsts",
    "system.cpu.fetchStats0.numBranches",
    "system.cpu.dcache.demandHits::cpu.data",
    "system.cpu.dcache.demandMisses::cpu.data",
    "system.cpu.dcache.ReadReq.hits::cpu.data",
    "system.cpu.dcache.ReadReq.misses::cpu.data",
    "system.cpu.dcache.WriteReq.hits::cpu.data",
    "system.cpu.dcache.WriteReq.misses::cpu.data",
    "system.cpu.icache.demandHits::cpu.inst",
    "system.cpu.icache.demandMisses::cpu.inst",
    "system.cpu.icache.ReadReq.hits::cpu.inst",
    "system.cpu.icache.ReadReq.misses::cpu.inst",
    "system.l2.demandHits::cpu.data",
    "system.l2.demandMisses::cpu.inst",
    "system.l2.demandMisses::cpu.data",
    "system.l2.demandMisses::total",
};

// Access totals the emulator reports alongside the selected events, so that
// hits + misses == accesses can be checked per sample.
inline constexpr std::array<std::string_view, 9> kAccessEvents = {
    "system.cpu.dcache.demandAccesses::cpu.data",
    "system.cpu.dcache.ReadReq.accesses::cpu.data",
    "system.cpu.dcache.WriteReq.accesses::cpu.data",
    "system.cpu.icache.demandAccesses::cpu.inst",
    "system.cpu.icache.ReadReq.accesses::cpu.inst",
    "system.l2.demandHits::cpu.inst",
    "system.l2.demandAccesses::cpu.inst",
    "system.l2.demandAccesses::cpu.data",
    "system.l2.demandAccesses::total",
};

std::vector<std::string> emulator_event_names();

enum class SampleLabel : std::uint8_t { Benign, Attack, Unknown };

std::string_view to_string(SampleLabel label);
std::optional<SampleLabel> parse_sample_label(std::string_view text);

// One observation window. Values line up with CounterTable::names.
struct CounterSample {
  std::uint64_t window_id = 0;
  SampleLabel label = SampleLabel::Unknown;
  std::uint64_t frames = 0;
  std::vector<double> values;

  bool operator==(const CounterSample&) const = default;
};

struct CounterTable {
  std::vector<std::string> names;
  std::vector<CounterSample> samples;

  std::optional<std::size_t> index_of(std::string_view name) const;
  double value(const CounterSample& sample, std::string_view name) const;

  bool operator==(const CounterTable&) const = default;
};

// Values in emulator_event_names() order.
std::vector<double> to_event_values(const EventCounts& counts);

struct ConsistencyViolation {
  std::string hits, misses, accesses;
};

// Every (hits, misses, accesses) triple whose three names are all present
// must satisfy hits + misses == accesses. Returns the first violation.
std::optional<ConsistencyViolation> check_consistency(const CounterTable& table,
                                                      const CounterSample& sample);

inline constexpr std::string_view kCounterCsvPrefix = "window_id,label,frames";

void write_counters_csv(const CounterTable& table, std::ostream& out);
CounterTable read_counters_csv(std::istream& in);

}  // namespace hpcids
