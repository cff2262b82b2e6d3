#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "hpcids/can_frame.hpp"

namespace hpcids {

struct PeriodicId {
  std::uint16_t id = 0;
  double period = 0.01;  // seconds
  std::uint8_t dlc = 8;
};

struct BenignProfile {
  std::vector<PeriodicId> ids;
  double duration = 1.0;  // seconds
  std::uint64_t rng_seed = 0;
};

// A passenger-car sized set of periodic identifiers, the kind of mix seen on
// an OBD-II capture of a powertrain bus.
std::vector<PeriodicId> default_id_set();

void validate(const BenignProfile& profile);

enum class DosPayload : std::uint8_t { Zeros, RandomSeeded };

struct DosProfile {
  double start = 0.0;
  double stop = 0.0;
  double period = 0.0005;
  DosPayload payload = DosPayload::Zeros;
  std::uint64_t payload_seed = 0;
};

void validate(const DosProfile& profile);

// Number of k >= 0 with start + k * period < stop, robust to the rounding of
// decimal periods (0.1 / 0.01 yields ten instants, not eleven).
std::size_t periodic_count(double start, double stop, double period);

// Frames at k * period for every identifier, merged by ready time (ties keep
// id-set order). Payloads come from one xorshift stream per identifier.
std::vector<CanFrame> generate_benign(const BenignProfile& profile);

// Adds identifier-0 frames at start + k * period < stop and re-sorts by
// ready time. Existing frames keep their relative order.
std::vector<CanFrame> inject_dos(std::span<const CanFrame> benign, const DosProfile& profile);

struct BusModel {
  FrameTiming timing;
};

struct ScheduledFrame {
  CanFrame frame;  // timestamp is the ready (enqueue) time
  double tx_start = 0.0;
  double tx_end = 0.0;

  double delay() const { return tx_start - frame.timestamp; }
};

// Event-driven, non-preemptive bus: whenever the bus goes idle, the lowest
// identifier among frames ready by then wins arbitration. Ties fall back to
// earlier ready time, then input position. The output is ordered by tx_start.
std::vector<ScheduledFrame> arbitrate(std::span<const CanFrame> ready, const BusModel& bus);

struct DelayStats {
  std::size_t count = 0;
  double mean = 0.0;
  double max = 0.0;
};

std::map<std::uint16_t, DelayStats> delay_stats(std::span<const ScheduledFrame> schedule);

// Schedule as frames stamped with their transmission start, for CSV export.
std::vector<CanFrame> transmitted_frames(std::span<const ScheduledFrame> schedule);

// Rebuilds a schedule from frames whose timestamps are transmission starts.
std::vector<ScheduledFrame> schedule_from_transmitted(std::span<const CanFrame> frames,
                                                      const FrameTiming& timing);

}  // namespace hpcids
