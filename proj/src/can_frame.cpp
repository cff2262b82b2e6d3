#include "hpcids/can_frame.hpp"

#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "text_util.hpp"

namespace hpcids {

std::string_view to_string(FrameLabel label) {
  return label == FrameLabel::DosInjected ? "dos" : "benign";
}

void validate(const CanFrame& frame) {
  if (!std::isfinite(frame.timestamp) || frame.timestamp < 0.0)
    throw Error(ErrorKind::MalformedRecord, fmt::format("timestamp {} out of range", frame.timestamp));
  if (frame.id > kMaxStandardId)
    throw Error(ErrorKind::MalformedRecord, fmt::format("identifier 0x{:X} exceeds 0x7FF", frame.id));
  if (frame.dlc > kMaxDlc)
    throw Error(ErrorKind::MalformedRecord, fmt::format("dlc {} exceeds 8", frame.dlc));
  for (std::size_t i = frame.dlc; i < frame.data.size(); ++i)
    if (frame.data[i] != 0) throw Error(ErrorKind::MalformedRecord, "payload bytes beyond dlc must be zero");
}

double frame_tx_time(std::uint8_t dlc, const FrameTiming& timing) {
  return static_cast<double>(frame_bits(dlc, timing.worst_case_stuffing)) / timing.bitrate;
}

double frame_tx_time(const CanFrame& frame, const FrameTiming& timing) {
  return frame_tx_time(frame.dlc, timing);
}

namespace {

Error malformed(std::string_view what) { return Error(ErrorKind::MalformedRecord, std::string(what)); }

std::uint16_t parse_id(std::string_view token) {
  const auto id = detail::parse_hex<std::uint32_t>(token);
  if (!id) throw malformed(fmt::format("bad identifier '{}'", token));
  if (*id > kMaxStandardId) throw malformed(fmt::format("identifier 0x{:X} exceeds 0x7FF", *id));
  return static_cast<std::uint16_t>(*id);
}

std::uint8_t parse_dlc(std::string_view token) {
  const auto dlc = detail::parse_int<unsigned>(token);
  if (!dlc) throw malformed(fmt::format("bad dlc '{}'", token));
  if (*dlc > kMaxDlc) throw malformed(fmt::format("dlc {} exceeds 8", *dlc));
  return static_cast<std::uint8_t>(*dlc);
}

double parse_timestamp(std::string_view token) {
  const auto t = detail::parse_double(token);
  if (!t || !std::isfinite(*t) || *t < 0.0) throw malformed(fmt::format("bad timestamp '{}'", token));
  return *t;
}

// Shared driver for both line formats: lenient mode records a diagnostic and
// moves on, strict mode rethrows with the line number attached.
template <typename LineParser>
FrameLog read_lines(std::istream& in, const ParseOptions& options, std::size_t first_line,
                    LineParser&& parse_line) {
  FrameLog log;
  std::string line;
  std::size_t line_no = first_line;
  while (std::getline(in, line)) {
    ++line_no;
    try {
      auto frame = parse_line(detail::trim(line));
      if (!frame) continue;
      if (!log.frames.empty() && frame->timestamp < log.frames.back().timestamp)
        throw malformed("timestamp decreases");
      log.frames.push_back(*frame);
    } catch (const Error& e) {
      if (options.strict)
        throw Error(e.kind(), fmt::format("line {}: {}", line_no, e.what()));
      log.diagnostics.push_back({line_no, e.what()});
    }
  }
  return log;
}

}  // namespace

std::optional<CanFrame> parse_otids_line(std::string_view line) {
  line = detail::trim(line);
  if (line.empty() || line.front() == '#') return std::nullopt;

  const auto tokens = detail::split_ws(line);
  CanFrame frame;
  std::size_t i = 0;
  auto expect_key = [&](std::string_view key) {
    if (i >= tokens.size() || tokens[i] != key) throw malformed(fmt::format("missing '{}'", key));
    ++i;
    if (i >= tokens.size()) throw malformed(fmt::format("missing value after '{}'", key));
    return tokens[i++];
  };

  frame.timestamp = parse_timestamp(expect_key("Timestamp:"));
  frame.id = parse_id(expect_key("ID:"));
  // Skip the flags column(s) up to the DLC key.
  while (i < tokens.size() && tokens[i] != "DLC:") ++i;
  frame.dlc = parse_dlc(expect_key("DLC:"));

  if (tokens.size() - i != frame.dlc)
    throw malformed(fmt::format("dlc {} but {} payload bytes", frame.dlc, tokens.size() - i));
  for (std::size_t b = 0; b < frame.dlc; ++b) {
    const auto byte = detail::parse_hex<std::uint32_t>(tokens[i + b]);
    if (!byte || *byte > 0xFF || tokens[i + b].size() > 2)
      throw malformed(fmt::format("bad payload byte '{}'", tokens[i + b]));
    frame.data[b] = static_cast<std::uint8_t>(*byte);
  }
  frame.label = frame.id == 0 ? FrameLabel::DosInjected : FrameLabel::Benign;
  return frame;
}

FrameLog read_otids(std::istream& in, const ParseOptions& options) {
  return read_lines(in, options, 0, [](std::string_view line) { return parse_otids_line(line); });
}

FrameLog parse_csv(std::istream& in, const ParseOptions& options) {
  std::string header;
  if (!std::getline(in, header) || detail::trim(header) != kFrameCsvHeader)
    throw Error(ErrorKind::HeaderMismatch, fmt::format("expected header '{}'", kFrameCsvHeader));

  return read_lines(in, options, 1, [](std::string_view line) -> std::optional<CanFrame> {
    if (line.empty()) return std::nullopt;
    const auto fields = detail::split(line, ',');
    if (fields.size() != 5) throw malformed(fmt::format("expected 5 fields, got {}", fields.size()));

    CanFrame frame;
    frame.timestamp = parse_timestamp(fields[0]);
    frame.id = parse_id(fields[1]);
    frame.dlc = parse_dlc(fields[2]);
    const auto hex = fields[3];
    if (hex.size() != 2u * frame.dlc)
      throw malformed(fmt::format("payload_hex has {} digits, dlc {} needs {}", hex.size(), frame.dlc,
                                  2 * frame.dlc));
    for (std::size_t b = 0; b < frame.dlc; ++b) {
      const auto byte = detail::parse_hex<std::uint32_t>(hex.substr(2 * b, 2));
      if (!byte) throw malformed(fmt::format("bad payload_hex '{}'", hex));
      frame.data[b] = static_cast<std::uint8_t>(*byte);
    }
    if (fields[4] == "benign")
      frame.label = FrameLabel::Benign;
    else if (fields[4] == "dos")
      frame.label = FrameLabel::DosInjected;
    else
      throw malformed(fmt::format("unknown label '{}'", fields[4]));
    return frame;
  });
}

std::string format_csv_row(const CanFrame& frame) {
  std::string payload;
  payload.reserve(2 * frame.dlc);
  for (auto byte : frame.payload()) fmt::format_to(std::back_inserter(payload), "{:02X}", byte);
  return fmt::format("{:.6f},{:03X},{},{},{}", frame.timestamp, frame.id, frame.dlc, payload,
                     to_string(frame.label));
}

std::size_t write_csv(std::span<const CanFrame> frames, std::ostream& out) {
  out << kFrameCsvHeader << '\n';
  for (const auto& frame : frames) {
    validate(frame);
    out << format_csv_row(frame) << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "frame CSV write failed");
  return frames.size();
}

}  // namespace hpcids
