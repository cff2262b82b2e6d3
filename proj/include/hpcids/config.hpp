#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>

#include "hpcids/can_frame.hpp"
#include "hpcids/ecu.hpp"
#include "hpcids/eval.hpp"
#include "hpcids/traffic.hpp"

namespace hpcids {

// Everything a pipeline run needs, with every module's defaults. Loaded
// from an INI file:
//
//   seed = 42
//   [traffic]  duration, bitrate, stuffing, ids = 0x316:0.01:8, 0x2A0:0.02 ...
//   [dos]      start, stop, period, payload = zeros | random
//   [ecu]      window = frame | frames:<N> | time:<seconds>, key = <32 hex>,
//              l1i_size, l1i_assoc, l1d_size, l1d_assoc, l2_size, l2_assoc, line_size
//   [features] prune_mode = redundancy | relevance, threshold
//   [ocsvm]    nu, gamma = auto | <value>, tolerance, max_iterations
//   [sweep]    fractions = 0.2, 0.25 ..., holdout
//
// Unknown sections or keys are rejected.
struct RunConfig {
  std::uint64_t seed = 0;
  BenignProfile traffic{default_id_set(), 60.0, 0};
  FrameTiming timing;
  DosProfile dos{0.0, 60.0, 0.0005, DosPayload::Zeros, 0};
  ReceiverConfig receiver;
  SweepConfig sweep;

  // Pushes `seed` into every stage through stage_seed().
  void derive_seeds();
};

void validate(const RunConfig& config);

RunConfig load_config(std::istream& in);
RunConfig load_config(const std::filesystem::path& path);

}  // namespace hpcids
