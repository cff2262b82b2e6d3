#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "hpcids/error.hpp"

namespace hpcids {

inline constexpr std::uint16_t kMaxStandardId = 0x7FF;
inline constexpr std::uint8_t kMaxDlc = 8;

enum class FrameLabel : std::uint8_t { Benign, DosInjected };

std::string_view to_string(FrameLabel label);

// Classic CAN 2.0A data frame (11-bit identifier).
struct CanFrame {
  double timestamp = 0.0;  // seconds
  std::uint16_t id = 0;
  std::uint8_t dlc = 0;
  std::array<std::uint8_t, 8> data{};  // bytes past dlc are always zero
  FrameLabel label = FrameLabel::Benign;

  std::span<const std::uint8_t> payload() const { return {data.data(), dlc}; }

  bool operator==(const CanFrame&) const = default;
};

// Throws MalformedRecord if the frame violates the id/dlc/timestamp ranges.
void validate(const CanFrame& frame);

struct FrameTiming {
  std::uint32_t bitrate = 500000;
  // Adds the worst-case stuff-bit count when set.
  bool worst_case_stuffing = false;
};

// Bits on the wire for a base-format data frame: SOF, arbitration, control,
// data, CRC, delimiters, ACK, EOF and 3-bit intermission.
constexpr std::uint32_t frame_bits(std::uint8_t dlc, bool worst_case_stuffing = false) {
  std::uint32_t bits = 47u + 8u * dlc;
  if (worst_case_stuffing) bits += (34u + 8u * dlc - 1u) / 4u;
  return bits;
}

double frame_tx_time(const CanFrame& frame, const FrameTiming& timing);
double frame_tx_time(std::uint8_t dlc, const FrameTiming& timing);

struct ParseOptions {
  bool strict = false;
};

struct FrameLog {
  std::vector<CanFrame> frames;
  std::vector<Diagnostic> diagnostics;
};

// One record of the OTIDS text capture format:
//   Timestamp: 1479121434.850202  ID: 0350  000  DLC: 8  05 28 84 66 6d 00 00 a2
// Returns nullopt for blank and '#' comment lines, throws MalformedRecord
// otherwise. Identifier 0 is labeled DosInjected, everything else Benign.
std::optional<CanFrame> parse_otids_line(std::string_view line);

FrameLog read_otids(std::istream& in, const ParseOptions& options = {});

inline constexpr std::string_view kFrameCsvHeader = "timestamp_s,id_hex,dlc,payload_hex,label";

FrameLog parse_csv(std::istream& in, const ParseOptions& options = {});

// Writes the canonical frame CSV. Returns the number of data rows.
std::size_t write_csv(std::span<const CanFrame> frames, std::ostream& out);

std::string format_csv_row(const CanFrame& frame);

}  // namespace hpcids
