#include "hpcids/stats_ingest.hpp"

#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "text_util.hpp"

namespace hpcids {

bool StatsSection::add(std::string name, double value) {
  if (index_.contains(name)) return false;
  index_.emplace(name, records_.size());
  records_.emplace_back(std::move(name), value);
  return true;
}

std::optional<double> StatsSection::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return records_[it->second].second;
}

namespace {

constexpr std::string_view kBegin = "Begin Simulation Statistics";
constexpr std::string_view kEnd = "End Simulation Statistics";

}  // namespace

StatsDump parse_stats(std::istream& in) {
  StatsDump dump;
  std::optional<StatsSection> open;
  std::size_t open_line = 0;
  std::string line;
  std::size_t line_no = 0;

  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.find(kBegin) != std::string_view::npos) {
      if (open)
        throw Error(ErrorKind::UnterminatedSection,
                    fmt::format("line {}: section opened at line {} not closed", line_no, open_line));
      open.emplace();
      open_line = line_no;
      continue;
    }
    if (text.find(kEnd) != std::string_view::npos) {
      if (!open) throw Error(ErrorKind::UnterminatedSection, fmt::format("line {}: End without Begin", line_no));
      dump.sections.push_back(std::move(*open));
      open.reset();
      continue;
    }
    if (!open || text.empty() || text.front() == '#') continue;

    auto body = text.substr(0, text.find('#'));
    const auto tokens = detail::split_ws(body);
    if (tokens.size() < 2) {
      dump.diagnostics.push_back({line_no, fmt::format("record '{}' has no value", text)});
      continue;
    }
    auto value_text = tokens[1];
    if (!value_text.empty() && value_text.back() == '%') value_text.remove_suffix(1);
    const auto value = detail::parse_double(value_text);
    if (!value || !std::isfinite(*value)) {
      dump.diagnostics.push_back({line_no, fmt::format("NonNumericValue: '{}' = '{}'", tokens[0], tokens[1])});
      continue;
    }
    if (!open->add(std::string(tokens[0]), *value))
      dump.diagnostics.push_back({line_no, fmt::format("duplicate record '{}' ignored", tokens[0])});
  }
  if (open)
    throw Error(ErrorKind::UnterminatedSection, fmt::format("section opened at line {} never closed", open_line));
  return dump;
}

void write_stats(const StatsDump& dump, std::ostream& out) {
  for (const auto& section : dump.sections) {
    out << "\n---------- Begin Simulation Statistics ----------\n";
    for (const auto& [name, value] : section.records()) out << fmt::format("{:<60} {}\n", name, value);
    out << "\n---------- End Simulation Statistics   ----------\n";
  }
}

EventMatrix select_events(const StatsDump& dump, std::span<const std::string> names) {
  if (names.empty()) throw Error(ErrorKind::InvalidArgument, "no event names selected");
  EventMatrix m;
  m.names.assign(names.begin(), names.end());
  m.rows.reserve(dump.sections.size());
  for (const auto& section : dump.sections) {
    auto& row = m.rows.emplace_back();
    row.reserve(names.size());
    for (const auto& n : names) row.push_back(section.find(n));
  }
  return m;
}

std::vector<std::string> selected_event_names() { return {kSelectedEvents.begin(), kSelectedEvents.end()}; }

IngestResult samples_from_stats(const EventMatrix& matrix, std::span<const SampleLabel> labels) {
  if (labels.size() != matrix.rows.size())
    throw Error(ErrorKind::LabelCountMismatch,
                fmt::format("{} labels for {} sections", labels.size(), matrix.rows.size()));
  IngestResult result;
  result.table.names = matrix.names;
  for (std::size_t r = 0; r < matrix.rows.size(); ++r) {
    const auto& row = matrix.rows[r];
    CounterSample sample;
    sample.window_id = r;
    sample.label = labels[r];
    sample.values.reserve(row.size());
    std::optional<std::size_t> missing;
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!row[c]) {
        missing = c;
        break;
      }
      sample.values.push_back(*row[c]);
    }
    if (missing) {
      result.diagnostics.push_back(
          {r + 1, fmt::format("section {} lacks '{}', dropped", r + 1, matrix.names[*missing])});
      continue;
    }
    result.table.samples.push_back(std::move(sample));
  }
  return result;
}

std::vector<SampleLabel> read_labels(std::istream& in) {
  std::vector<SampleLabel> labels;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto label = parse_sample_label(text);
    if (!label || *label == SampleLabel::Unknown)
      throw Error(ErrorKind::MalformedRecord, fmt::format("labels line {}: '{}'", line_no, text));
    labels.push_back(*label);
  }
  return labels;
}

}  // namespace hpcids
