#pragma once

#include <cstdint>
#include <span>
#include <variant>

#include "hpcids/aes.hpp"
#include "hpcids/cache.hpp"
#include "hpcids/counters.hpp"
#include "hpcids/traffic.hpp"

namespace hpcids {

// Code and data layout of the emulated receiver task. Addresses follow a
// RISC-V board with DRAM at 0x8000'0000.
namespace ecu_layout {

inline constexpr std::uint64_t kSboxBase = 0x8010'0000;
inline constexpr std::uint64_t kRoundKeyBase = 0x8010'0100;
inline constexpr std::uint64_t kStateBase = 0x8010'0200;
inline constexpr std::uint64_t kRtosDataBase = 0x8010'0400;
inline constexpr std::uint64_t kRxRingBase = 0x8020'0000;
inline constexpr std::uint64_t kTxRingBase = 0x8030'0000;
inline constexpr std::uint64_t kSlotBytes = 16;
inline constexpr std::uint64_t kRingSlots = 4096;

// A straight-line prologue followed by a loop whose body is re-fetched on
// every iteration. Each iteration retires one backward branch.
struct CodeRoutine {
  std::uint64_t addr;
  std::uint32_t prologue;  // instructions
  std::uint32_t body;      // instructions per iteration
  std::uint32_t branches;  // calls, returns and exits, excluding back-edges
};

inline constexpr CodeRoutine kQueueReceive{0x8000'0000, 96, 0, 6};
inline constexpr CodeRoutine kRxCopy{0x8000'0400, 14, 6, 2};     // one iteration per payload byte
inline constexpr CodeRoutine kRxPad{0x8000'0480, 2, 4, 1};       // one iteration per padding byte
inline constexpr CodeRoutine kRoundLoop{0x8000'0700, 4, 0, 1};   // charged once per full/final round
inline constexpr CodeRoutine kAddRoundKey{0x8000'0800, 8, 6, 2};  // 16 iterations
inline constexpr CodeRoutine kSubBytes{0x8000'0A00, 8, 5, 2};     // 16 iterations
inline constexpr CodeRoutine kShiftRows{0x8000'0C00, 10, 4, 2};   // 16 iterations
inline constexpr CodeRoutine kMixColumns{0x8000'0E00, 8, 22, 2};  // 4 iterations (columns)
inline constexpr CodeRoutine kTxCopy{0x8000'1100, 6, 4, 2};       // 16 iterations

inline constexpr std::uint32_t kQueueLoads = 8;
inline constexpr std::uint32_t kQueueStores = 4;

}  // namespace ecu_layout

struct PerFrame {};
struct PerNFrames {
  std::uint64_t n = 1;
};
struct PerTime {
  double seconds = 0.010;
};
using WindowPolicy = std::variant<PerFrame, PerNFrames, PerTime>;

void validate(const WindowPolicy& policy);

// The receiving ECU: pulls each frame from an RX ring, zero-pads the payload
// into one AES block, encrypts it and pushes the ciphertext to a TX ring,
// with every instruction fetch and data access driven through the cache
// hierarchy. Caches are never flushed.
class EcuEmulator {
 public:
  EcuEmulator(const aes::Key& key, const CacheConfig& cache);

  // Runs one frame and returns the event deltas it caused.
  EventCounts process_frame(const CanFrame& frame);

  const EventCounts& totals() const { return caches_.counts(); }
  const aes::AesState& aes() const { return aes_; }
  const aes::Block& last_ciphertext() const { return last_ciphertext_; }

 private:
  void run(const ecu_layout::CodeRoutine& routine, std::uint32_t iterations);
  void load(std::uint64_t addr) { caches_.access(addr, AccessKind::Load); }
  void store(std::uint64_t addr) { caches_.access(addr, AccessKind::Store); }

  aes::AesState aes_;
  CacheHierarchy caches_;
  std::uint64_t rx_slot_ = 0;
  std::uint64_t tx_slot_ = 0;
  aes::Block last_ciphertext_{};

  friend struct EcuProbe;
};

inline constexpr aes::Key kDefaultEcuKey = {0x2B, 0x7E, 0x15, 0x16, 0x28, 0xAE, 0xD2, 0xA6,
                                            0xAB, 0xF7, 0x15, 0x88, 0x09, 0xCF, 0x4F, 0x3C};

struct ReceiverConfig {
  WindowPolicy policy = PerTime{};
  CacheConfig cache;
  aes::Key key = kDefaultEcuKey;
};

// Feeds the schedule (sorted by tx_start) through one emulator and emits a
// sample per window, with emulator_event_names() columns. Time windows are
// assigned by tx_end and numbered from zero; empty windows in between are
// emitted with zero counts. A window is Attack iff it holds a DoS frame.
CounterTable run_receiver(std::span<const ScheduledFrame> schedule, const ReceiverConfig& config);

}  // namespace hpcids
