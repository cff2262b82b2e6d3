#include "hpcids/ecu.hpp"

#include <cmath>

#include <fmt/format.h>

namespace hpcids {

using namespace ecu_layout;

void validate(const WindowPolicy& policy) {
  if (const auto* n = std::get_if<PerNFrames>(&policy); n && n->n < 1)
    throw Error(ErrorKind::InvalidArgument, "frames per window must be >= 1");
  if (const auto* t = std::get_if<PerTime>(&policy); t && !(t->seconds > 0.0 && std::isfinite(t->seconds)))
    throw Error(ErrorKind::InvalidArgument, "window length must be a positive number of seconds");
}

// Routes the cipher's table and state accesses into the cache model and
// charges each step's code footprint.
struct EcuProbe {
  EcuEmulator& ecu;

  void step(aes::Step s) {
    switch (s) {
      case aes::Step::AddRoundKey: ecu.run(kAddRoundKey, 16); break;
      case aes::Step::SubBytes:
        // SubBytes opens every round after the initial key whitening.
        ecu.run(kRoundLoop, 0);
        ecu.run(kSubBytes, 16);
        break;
      case aes::Step::ShiftRows: ecu.run(kShiftRows, 16); break;
      case aes::Step::MixColumns: ecu.run(kMixColumns, 4); break;
    }
  }
  void state_load(int i) { ecu.load(kStateBase + static_cast<std::uint64_t>(i)); }
  void state_store(int i) { ecu.store(kStateBase + static_cast<std::uint64_t>(i)); }
  void sbox_load(std::uint8_t v) { ecu.load(kSboxBase + v); }
  void round_key_load(int round, int i) { ecu.load(kRoundKeyBase + static_cast<std::uint64_t>(16 * round + i)); }
};

EcuEmulator::EcuEmulator(const aes::Key& key, const CacheConfig& cache) : aes_(key), caches_(cache) {}

void EcuEmulator::run(const CodeRoutine& routine, std::uint32_t iterations) {
  auto& c = caches_.counts();
  for (std::uint32_t k = 0; k < routine.prologue; ++k) caches_.access(routine.addr + 4 * k, AccessKind::InstFetch);
  const std::uint64_t body = routine.addr + 4ull * routine.prologue;
  for (std::uint32_t it = 0; it < iterations; ++it)
    for (std::uint32_t k = 0; k < routine.body; ++k) caches_.access(body + 4 * k, AccessKind::InstFetch);
  c.insts += routine.prologue + static_cast<std::uint64_t>(iterations) * routine.body;
  c.branches += routine.branches + iterations;
}

EventCounts EcuEmulator::process_frame(const CanFrame& frame) {
  const EventCounts before = caches_.counts();

  // RTOS queue receive wakes the task.
  run(kQueueReceive, 0);
  for (std::uint32_t k = 0; k < kQueueLoads; ++k) load(kRtosDataBase + 8 * k);
  for (std::uint32_t k = 0; k < kQueueStores; ++k) store(kRtosDataBase + 8 * k);

  // Copy the frame out of its RX slot into the zero-padded AES block.
  const std::uint64_t slot = kRxRingBase + (rx_slot_++ % kRingSlots) * kSlotBytes;
  run(kRxCopy, frame.dlc);
  load(slot);
  load(slot + 4);
  aes::Block block{};
  for (std::uint8_t b = 0; b < frame.dlc; ++b) {
    load(slot + 8 + b);
    block[b] = frame.data[b];
  }
  run(kRxPad, 16u - frame.dlc);
  for (int i = 0; i < 16; ++i) store(kStateBase + static_cast<std::uint64_t>(i));

  EcuProbe probe{*this};
  last_ciphertext_ = aes::encrypt_traced(aes_, block, probe);

  // Push the ciphertext to the TX ring.
  const std::uint64_t out = kTxRingBase + (tx_slot_++ % kRingSlots) * kSlotBytes;
  run(kTxCopy, 16);
  for (int i = 0; i < 16; ++i) {
    load(kStateBase + static_cast<std::uint64_t>(i));
    store(out + static_cast<std::uint64_t>(i));
  }

  return caches_.counts() - before;
}

CounterTable run_receiver(std::span<const ScheduledFrame> schedule, const ReceiverConfig& config) {
  validate(config.policy);
  validate(config.cache);
  for (std::size_t i = 1; i < schedule.size(); ++i)
    if (schedule[i].tx_start < schedule[i - 1].tx_start)
      throw Error(ErrorKind::InvalidArgument, "receiver needs a schedule sorted by tx_start");

  CounterTable table;
  table.names = emulator_event_names();
  EcuEmulator ecu(config.key, config.cache);

  struct Window {
    EventCounts counts;
    std::uint64_t frames = 0;
    bool attack = false;
  };
  std::vector<Window> windows;

  auto window_of = [&](std::size_t index, const ScheduledFrame& s) -> std::uint64_t {
    return std::visit(
        [&](const auto& p) -> std::uint64_t {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, PerFrame>)
            return index;
          else if constexpr (std::is_same_v<P, PerNFrames>)
            return index / p.n;
          else
            return static_cast<std::uint64_t>(std::floor(s.tx_end / p.seconds));
        },
        config.policy);
  };

  for (std::size_t i = 0; i < schedule.size(); ++i) {
    const auto& s = schedule[i];
    const auto w = window_of(i, s);
    if (w >= windows.size()) windows.resize(w + 1);
    windows[w].counts += ecu.process_frame(s.frame);
    ++windows[w].frames;
    windows[w].attack = windows[w].attack || s.frame.label == FrameLabel::DosInjected;
  }

  table.samples.reserve(windows.size());
  for (std::size_t w = 0; w < windows.size(); ++w) {
    CounterSample sample;
    sample.window_id = w;
    sample.label = windows[w].attack ? SampleLabel::Attack : SampleLabel::Benign;
    sample.frames = windows[w].frames;
    sample.values = to_event_values(windows[w].counts);
    table.samples.push_back(std::move(sample));
  }
  return table;
}

}  // namespace hpcids
