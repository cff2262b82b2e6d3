#include "hpcids/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include <fmt/format.h>

#include "hpcids/rng.hpp"

namespace hpcids {

std::vector<PeriodicId> default_id_set() {
  return {
      {0x018, 0.010, 8}, {0x034, 0.010, 8}, {0x042, 0.010, 8}, {0x043, 0.010, 8},
      {0x044, 0.010, 8}, {0x080, 0.010, 8}, {0x081, 0.010, 8}, {0x153, 0.010, 8},
      {0x164, 0.010, 8}, {0x165, 0.010, 8}, {0x18F, 0.010, 8}, {0x2C0, 0.010, 8},
      {0x050, 0.020, 3}, {0x1F1, 0.020, 8}, {0x260, 0.020, 8}, {0x2A0, 0.020, 8},
      {0x316, 0.020, 8}, {0x329, 0.020, 8}, {0x350, 0.100, 8}, {0x370, 0.100, 8},
      {0x382, 0.100, 8}, {0x43F, 0.100, 8}, {0x440, 0.100, 8}, {0x4B0, 0.100, 6},
      {0x4F1, 0.100, 4}, {0x545, 0.100, 8}, {0x5A0, 0.500, 8}, {0x690, 0.500, 8},
  };
}

void validate(const BenignProfile& profile) {
  if (profile.ids.empty()) throw Error(ErrorKind::EmptyProfile, "benign profile has no identifiers");
  if (!(profile.duration >= 0.0) || !std::isfinite(profile.duration))
    throw Error(ErrorKind::InvalidArgument, "duration must be a non-negative number of seconds");
  for (const auto& spec : profile.ids) {
    if (spec.id == 0 || spec.id > kMaxStandardId)
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("benign identifier 0x{:X} outside 0x001..0x7FF", spec.id));
    if (!(spec.period > 0.0) || !std::isfinite(spec.period))
      throw Error(ErrorKind::InvalidArgument, fmt::format("period of 0x{:X} must be positive", spec.id));
    if (spec.dlc > kMaxDlc)
      throw Error(ErrorKind::InvalidArgument, fmt::format("dlc of 0x{:X} exceeds 8", spec.id));
  }
}

void validate(const DosProfile& profile) {
  if (!(profile.start >= 0.0) || !(profile.stop >= profile.start))
    throw Error(ErrorKind::InvalidArgument, "attack window needs 0 <= start <= stop");
  if (!(profile.period > 0.0) || !std::isfinite(profile.period))
    throw Error(ErrorKind::InvalidArgument, "attack period must be positive");
}

std::size_t periodic_count(double start, double stop, double period) {
  if (!(stop > start)) return 0;
  const double q = (stop - start) / period;
  return static_cast<std::size_t>(std::ceil(q - 1e-9));
}

std::vector<CanFrame> generate_benign(const BenignProfile& profile) {
  validate(profile);

  struct Pending {
    CanFrame frame;
    std::size_t source;
  };
  std::vector<Pending> pending;
  for (std::size_t src = 0; src < profile.ids.size(); ++src) {
    const auto& spec = profile.ids[src];
    XorShift64 payload_rng(mix64(profile.rng_seed) ^ (static_cast<std::uint64_t>(spec.id) << 32 | src));
    const auto n = periodic_count(0.0, profile.duration, spec.period);
    for (std::size_t k = 0; k < n; ++k) {
      CanFrame f;
      f.timestamp = static_cast<double>(k) * spec.period;
      f.id = spec.id;
      f.dlc = spec.dlc;
      for (std::uint8_t b = 0; b < spec.dlc; ++b) f.data[b] = payload_rng.next_byte();
      pending.push_back({f, src});
    }
  }
  std::stable_sort(pending.begin(), pending.end(), [](const Pending& a, const Pending& b) {
    if (a.frame.timestamp != b.frame.timestamp) return a.frame.timestamp < b.frame.timestamp;
    return a.source < b.source;
  });

  std::vector<CanFrame> out;
  out.reserve(pending.size());
  for (auto& p : pending) out.push_back(p.frame);
  return out;
}

std::vector<CanFrame> inject_dos(std::span<const CanFrame> benign, const DosProfile& profile) {
  validate(profile);
  std::vector<CanFrame> out(benign.begin(), benign.end());
  const auto n = periodic_count(profile.start, profile.stop, profile.period);
  XorShift64 payload_rng(profile.payload_seed);
  out.reserve(out.size() + n);
  for (std::size_t k = 0; k < n; ++k) {
    CanFrame f;
    f.timestamp = profile.start + static_cast<double>(k) * profile.period;
    f.id = 0;
    f.dlc = 8;
    if (profile.payload == DosPayload::RandomSeeded)
      for (auto& b : f.data) b = payload_rng.next_byte();
    f.label = FrameLabel::DosInjected;
    out.push_back(f);
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const CanFrame& a, const CanFrame& b) { return a.timestamp < b.timestamp; });
  return out;
}

std::vector<ScheduledFrame> arbitrate(std::span<const CanFrame> ready, const BusModel& bus) {
  for (std::size_t i = 1; i < ready.size(); ++i)
    if (ready[i].timestamp < ready[i - 1].timestamp)
      throw Error(ErrorKind::InvalidArgument, "arbitrate needs frames sorted by ready time");

  // Lowest identifier first, then earlier ready time, then input position.
  auto loses_to = [&](std::size_t a, std::size_t b) {
    const auto& fa = ready[a];
    const auto& fb = ready[b];
    if (fa.id != fb.id) return fa.id > fb.id;
    if (fa.timestamp != fb.timestamp) return fa.timestamp > fb.timestamp;
    return a > b;
  };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(loses_to)> contenders(loses_to);

  std::vector<ScheduledFrame> schedule;
  schedule.reserve(ready.size());
  double now = 0.0;
  std::size_t next = 0;
  while (next < ready.size() || !contenders.empty()) {
    if (contenders.empty() && ready[next].timestamp > now) now = ready[next].timestamp;
    while (next < ready.size() && ready[next].timestamp <= now) contenders.push(next++);

    const auto winner = contenders.top();
    contenders.pop();
    const auto& frame = ready[winner];
    const double end = now + frame_tx_time(frame, bus.timing);
    schedule.push_back({frame, now, end});
    now = end;
  }
  return schedule;
}

std::map<std::uint16_t, DelayStats> delay_stats(std::span<const ScheduledFrame> schedule) {
  std::map<std::uint16_t, DelayStats> stats;
  std::map<std::uint16_t, double> sums;
  for (const auto& s : schedule) {
    auto& st = stats[s.frame.id];
    const double d = s.delay();
    ++st.count;
    sums[s.frame.id] += d;
    st.max = std::max(st.max, d);
  }
  for (auto& [id, st] : stats) st.mean = sums[id] / static_cast<double>(st.count);
  return stats;
}

std::vector<CanFrame> transmitted_frames(std::span<const ScheduledFrame> schedule) {
  std::vector<CanFrame> out;
  out.reserve(schedule.size());
  for (const auto& s : schedule) {
    CanFrame f = s.frame;
    f.timestamp = s.tx_start;
    out.push_back(f);
  }
  return out;
}

std::vector<ScheduledFrame> schedule_from_transmitted(std::span<const CanFrame> frames,
                                                      const FrameTiming& timing) {
  std::vector<ScheduledFrame> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back({f, f.timestamp, f.timestamp + frame_tx_time(f, timing)});
  return out;
}

}  // namespace hpcids
