#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "hpcids/matrix.hpp"

namespace hpcids {

struct Standardizer {
  std::vector<double> means;
  std::vector<double> stds;  // population (divide by n)
};

// Per-column population mean and standard deviation. Needs >= 2 rows.
Standardizer fit_standardizer(const Matrix& train);

// A column whose spread is indistinguishable from round-off of its mean.
bool is_degenerate(double mean, double std);

// z = (x - mean) / std for every column; degenerate columns map to 0.
Matrix transform(const Standardizer& s, const Matrix& samples);

// Pearson correlation, or nullopt when either side has zero variance.
std::optional<double> pearson(std::span<const double> a, std::span<const double> b);

enum class PruneMode { InterFeatureRedundancy, LabelRelevance };

std::string_view to_string(PruneMode mode);
PruneMode parse_prune_mode(std::string_view text);

inline constexpr double kDefaultPruneThreshold = 0.9;

// InterFeatureRedundancy: drop uncomputable columns, then scan pairs in
// column order and drop the later column of any pair with |r| > threshold.
// LabelRelevance: keep a column iff |r(column, label)| >= threshold.
std::vector<bool> prune(const Matrix& samples, std::optional<std::span<const double>> labels, PruneMode mode,
                        double threshold);

struct LabeledRows {
  const Matrix& rows;
  std::span<const double> labels;  // 0 benign, 1 attack
};

// Fitted preprocessing: standardization statistics plus the kept-column mask.
struct FeaturePipelineState {
  static constexpr int kVersion = 1;

  std::vector<std::string> feature_names;
  std::vector<double> means;
  std::vector<double> stds;
  std::vector<bool> kept_mask;
  PruneMode prune_mode = PruneMode::InterFeatureRedundancy;
  double threshold = kDefaultPruneThreshold;

  std::vector<std::string> kept_names() const;
  std::size_t kept_count() const;

  // Standardizes samples and keeps only the selected columns.
  Matrix apply(const Matrix& samples) const;

  bool operator==(const FeaturePipelineState&) const = default;
};

// Statistics always come from `train`. LabelRelevance computes relevance on
// `relevance` (which must carry both classes); redundancy pruning uses train.
FeaturePipelineState fit_pipeline(std::vector<std::string> names, const Matrix& train, PruneMode mode,
                                  double threshold, std::optional<LabeledRows> relevance = std::nullopt);

void to_json(nlohmann::json& j, const FeaturePipelineState& s);
void from_json(const nlohmann::json& j, FeaturePipelineState& s);

}  // namespace hpcids
