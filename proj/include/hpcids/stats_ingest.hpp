#pragma once

#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "hpcids/counters.hpp"
#include "hpcids/error.hpp"

namespace hpcids {

// One "Begin/End Simulation Statistics" block, records in file order.
class StatsSection {
 public:
  // Returns false (and keeps the first value) if name is already present.
  bool add(std::string name, double value);

  std::optional<double> find(std::string_view name) const;
  const std::vector<std::pair<std::string, double>>& records() const { return records_; }
  std::size_t size() const { return records_.size(); }

 private:
  std::vector<std::pair<std::string, double>> records_;
  std::unordered_map<std::string, std::size_t> index_;
};

struct StatsDump {
  std::vector<StatsSection> sections;
  std::vector<Diagnostic> diagnostics;  // skipped records
};

// Parses a gem5 stats.txt. Vector and distribution entries ("name::sub")
// become independent scalars. Percent columns and trailing "# comment" text
// are ignored; records whose value is nan/inf/non-numeric are skipped with a
// diagnostic. Throws UnterminatedSection on a missing End marker or a nested
// Begin marker.
StatsDump parse_stats(std::istream& in);

// Re-emits the captured records in gem5 layout.
void write_stats(const StatsDump& dump, std::ostream& out);

// Sections x names; an event missing from a section stays empty.
struct EventMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<std::optional<double>>> rows;
};

EventMatrix select_events(const StatsDump& dump, std::span<const std::string> names);

std::vector<std::string> selected_event_names();

struct IngestResult {
  CounterTable table;
  std::vector<Diagnostic> diagnostics;  // line = 1-based section index
};

// One sample per section; sections with an absent event are dropped.
IngestResult samples_from_stats(const EventMatrix& matrix, std::span<const SampleLabel> labels);

// One label per non-blank line ("benign" / "attack").
std::vector<SampleLabel> read_labels(std::istream& in);

}  // namespace hpcids
