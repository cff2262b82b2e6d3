#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpcids/counters.hpp"
#include "hpcids/features.hpp"
#include "hpcids/ocsvm.hpp"

namespace hpcids {

// Positive class is Attack.
struct ConfusionCounts {
  std::uint64_t tp = 0;
  std::uint64_t fp = 0;
  std::uint64_t tn = 0;
  std::uint64_t fn = 0;

  std::uint64_t total() const { return tp + fp + tn + fn; }
  bool operator==(const ConfusionCounts&) const = default;
};

// Ratios whose denominator is zero stay empty.
struct Metrics {
  std::optional<double> accuracy;
  std::optional<double> precision;
  std::optional<double> recall;
  std::optional<double> f1;  // tp / (tp + (fn + fp) / 2)
  std::optional<double> fpr;

  bool operator==(const Metrics&) const = default;
};

Metrics metrics(const ConfusionCounts& c);

// Rows of `table` (all columns) as a matrix.
Matrix to_matrix(const CounterTable& table);
Matrix to_matrix(const CounterTable& table, std::span<const std::size_t> rows);

// Standardize + prune + one-class SVM, fitted together and stored together.
struct DetectorModel {
  static constexpr int kVersion = 1;

  FeaturePipelineState features;
  OcsvmModel ocsvm;

  std::vector<double> decision(const Matrix& raw) const;
};

struct DetectorConfig {
  PruneMode prune_mode = PruneMode::InterFeatureRedundancy;
  double prune_threshold = kDefaultPruneThreshold;
  OcsvmConfig ocsvm;
};

// `train` holds benign rows only. `relevance` is consulted only by
// LabelRelevance pruning.
DetectorModel fit_detector(const std::vector<std::string>& names, const Matrix& train, const DetectorConfig& config,
                           std::optional<LabeledRows> relevance = std::nullopt);

void to_json(nlohmann::json& j, const DetectorModel& m);
void from_json(const nlohmann::json& j, DetectorModel& m);

// An Anomaly verdict counts as a positive prediction.
ConfusionCounts confusion(std::span<const double> decisions, std::span<const SampleLabel> labels,
                          double band = kBoundaryEpsilon);

struct SweepConfig {
  std::vector<double> fractions = default_fractions();
  double holdout = 0.05;
  std::uint64_t seed = 0;
  DetectorConfig detector;

  static std::vector<double> default_fractions();  // 0.20, 0.25, ..., 0.95
};

void validate(const SweepConfig& config);

// One seeded shuffle of the benign rows. The first `holdout_count` shuffled
// rows are the benign test block shared by every fraction; training sets are
// prefixes of the rest, so they nest as the fraction grows.
struct SplitPlan {
  std::vector<std::size_t> order;
  std::size_t holdout_count = 0;

  static SplitPlan make(std::size_t n, double holdout, std::uint64_t seed);

  // floor(fraction * n) rows, fraction taken of the whole benign set.
  std::size_t train_count(double fraction) const;
  std::vector<std::size_t> benign_test() const;
  std::vector<std::size_t> train(double fraction) const;
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> benign_test;
};

Split split(std::size_t n, double fraction, double holdout, std::uint64_t seed);

struct SweepRow {
  double fraction = 0.0;
  ConfusionCounts counts;
  Metrics metrics;
  std::vector<std::string> kept_features;
  std::size_t train_size = 0;
  std::size_t benign_test_size = 0;
  std::size_t attack_test_size = 0;
  bool converged = true;
};

struct EvalReport {
  std::vector<SweepRow> rows;
};

EvalReport run_sweep(const CounterTable& benign, const CounterTable& attack, const SweepConfig& config);

inline constexpr std::string_view kReportCsvHeader = "fraction,tp,fp,tn,fn,accuracy,precision,recall,f1,fpr";

void write_report_csv(const EvalReport& report, std::ostream& out);
void write_report_json(const EvalReport& report, std::ostream& out);
EvalReport read_report_csv(std::istream& in);
EvalReport read_report_json(std::istream& in);

enum class SeriesMetric { Accuracy, F1 };
// Two-column `fraction,<metric>` series for plotting.
void write_series(const EvalReport& report, SeriesMetric metric, std::ostream& out);

}  // namespace hpcids
