#include "hpcids/counters.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "text_util.hpp"

namespace hpcids {

std::vector<std::string> emulator_event_names() {
  std::vector<std::string> names(kSelectedEvents.begin(), kSelectedEvents.end());
  names.insert(names.end(), kAccessEvents.begin(), kAccessEvents.end());
  return names;
}

std::string_view to_string(SampleLabel label) {
  switch (label) {
    case SampleLabel::Benign: return "benign";
    case SampleLabel::Attack: return "attack";
    case SampleLabel::Unknown: return "";
  }
  return "";
}

std::optional<SampleLabel> parse_sample_label(std::string_view text) {
  text = detail::trim(text);
  if (text == "benign" || text == "0") return SampleLabel::Benign;
  if (text == "attack" || text == "dos" || text == "1") return SampleLabel::Attack;
  if (text.empty() || text == "unknown") return SampleLabel::Unknown;
  return std::nullopt;
}

std::optional<std::size_t> CounterTable::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < names.size(); ++i)
    if (names[i] == name) return i;
  return std::nullopt;
}

double CounterTable::value(const CounterSample& sample, std::string_view name) const {
  const auto idx = index_of(name);
  if (!idx) throw Error(ErrorKind::InvalidArgument, fmt::format("no counter named '{}'", name));
  return sample.values.at(*idx);
}

std::vector<double> to_event_values(const EventCounts& c) {
  auto d = [](std::uint64_t v) { return static_cast<double>(v); };
  const auto dcache_hits = c.dcache_read_hits + c.dcache_write_hits;
  const auto dcache_misses = c.dcache_read_misses + c.dcache_write_misses;
  return {
      d(c.insts),
      d(c.branches),
      d(dcache_hits),
      d(dcache_misses),
      d(c.dcache_read_hits),
      d(c.dcache_read_misses),
      d(c.dcache_write_hits),
      d(c.dcache_write_misses),
      d(c.icache_hits),
      d(c.icache_misses),
      d(c.icache_hits),  // instruction fetches are all read requests
      d(c.icache_misses),
      d(c.l2_data_hits),
      d(c.l2_inst_misses),
      d(c.l2_data_misses),
      d(c.l2_inst_misses + c.l2_data_misses),
      // access totals
      d(dcache_hits + dcache_misses),
      d(c.dcache_read_hits + c.dcache_read_misses),
      d(c.dcache_write_hits + c.dcache_write_misses),
      d(c.icache_hits + c.icache_misses),
      d(c.icache_hits + c.icache_misses),
      d(c.l2_inst_hits),
      d(c.l2_inst_hits + c.l2_inst_misses),
      d(c.l2_data_hits + c.l2_data_misses),
      d(c.l2_inst_hits + c.l2_inst_misses + c.l2_data_hits + c.l2_data_misses),
  };
}

namespace {

struct Triple {
  std::string_view hits, misses, accesses;
};

constexpr Triple kTriples[] = {
    {"system.cpu.dcache.demandHits::cpu.data", "system.cpu.dcache.demandMisses::cpu.data",
     "system.cpu.dcache.demandAccesses::cpu.data"},
    {"system.cpu.dcache.ReadReq.hits::cpu.data", "system.cpu.dcache.ReadReq.misses::cpu.data",
     "system.cpu.dcache.ReadReq.accesses::cpu.data"},
    {"system.cpu.dcache.WriteReq.hits::cpu.data", "system.cpu.dcache.WriteReq.misses::cpu.data",
     "system.cpu.dcache.WriteReq.accesses::cpu.data"},
    {"system.cpu.icache.demandHits::cpu.inst", "system.cpu.icache.demandMisses::cpu.inst",
     "system.cpu.icache.demandAccesses::cpu.inst"},
    {"system.cpu.icache.ReadReq.hits::cpu.inst", "system.cpu.icache.ReadReq.misses::cpu.inst",
     "system.cpu.icache.ReadReq.accesses::cpu.inst"},
    {"system.l2.demandHits::cpu.inst", "system.l2.demandMisses::cpu.inst", "system.l2.demandAccesses::cpu.inst"},
    {"system.l2.demandHits::cpu.data", "system.l2.demandMisses::cpu.data", "system.l2.demandAccesses::cpu.data"},
    {"system.l2.demandHits::total", "system.l2.demandMisses::total", "system.l2.demandAccesses::total"},
};

}  // namespace

std::optional<ConsistencyViolation> check_consistency(const CounterTable& table, const CounterSample& sample) {
  for (const auto& t : kTriples) {
    const auto h = table.index_of(t.hits);
    const auto m = table.index_of(t.misses);
    const auto a = table.index_of(t.accesses);
    if (!h || !m || !a) continue;
    if (sample.values[*h] + sample.values[*m] != sample.values[*a])
      return ConsistencyViolation{std::string(t.hits), std::string(t.misses), std::string(t.accesses)};
  }
  return std::nullopt;
}

void write_counters_csv(const CounterTable& table, std::ostream& out) {
  out << kCounterCsvPrefix;
  for (const auto& n : table.names) out << ',' << n;
  out << '\n';
  std::string row;
  for (const auto& s : table.samples) {
    if (s.values.size() != table.names.size())
      throw Error(ErrorKind::ShapeMismatch, fmt::format("window {} has {} values for {} names", s.window_id,
                                                        s.values.size(), table.names.size()));
    row.clear();
    fmt::format_to(std::back_inserter(row), "{},{},{}", s.window_id, to_string(s.label), s.frames);
    for (double v : s.values) fmt::format_to(std::back_inserter(row), ",{}", v);
    out << row << '\n';
  }
  if (!out) throw Error(ErrorKind::Io, "counters CSV write failed");
}

CounterTable read_counters_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw Error(ErrorKind::HeaderMismatch, "empty counters file");
  const auto header = detail::split(detail::trim(line), ',');
  if (header.size() < 3 || header[0] != "window_id" || header[1] != "label" || header[2] != "frames")
    throw Error(ErrorKind::HeaderMismatch, fmt::format("counters header must start with '{}'", kCounterCsvPrefix));

  CounterTable table;
  for (std::size_t i = 3; i < header.size(); ++i) {
    if (header[i].empty()) throw Error(ErrorKind::HeaderMismatch, "empty event name in header");
    table.names.emplace_back(header[i]);
  }

  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto trimmed = detail::trim(line);
    if (trimmed.empty()) continue;
    const auto fields = detail::split(trimmed, ',');
    if (fields.size() != header.size())
      throw Error(ErrorKind::MalformedRecord,
                  fmt::format("line {}: {} fields, header has {}", line_no, fields.size(), header.size()));
    CounterSample s;
    const auto id = detail::parse_int<std::uint64_t>(fields[0]);
    const auto label = parse_sample_label(fields[1]);
    const auto frames = detail::parse_int<std::uint64_t>(fields[2]);
    if (!id || !label || !frames)
      throw Error(ErrorKind::MalformedRecord, fmt::format("line {}: bad window_id/label/frames", line_no));
    s.window_id = *id;
    s.label = *label;
    s.frames = *frames;
    s.values.reserve(table.names.size());
    for (std::size_t i = 3; i < fields.size(); ++i) {
      const auto v = detail::parse_double(fields[i]);
      if (!v || !std::isfinite(*v) || *v < 0.0)
        throw Error(ErrorKind::MalformedRecord,
                    fmt::format("line {}: counter '{}' has bad value '{}'", line_no, header[i], fields[i]));
      s.values.push_back(*v);
    }
    table.samples.push_back(std::move(s));
  }
  return table;
}

}  // namespace hpcids
