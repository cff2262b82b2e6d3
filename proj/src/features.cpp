#include "hpcids/features.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace hpcids {

namespace {

struct Moments {
  double mean = 0.0;
  double ss = 0.0;  // sum of squared deviations
};

Moments moments(std::span<const double> x) {
  Moments m;
  for (double v : x) m.mean += v;
  m.mean /= static_cast<double>(x.size());
  double comp = 0.0;
  for (double v : x) {
    const double d = v - m.mean;
    m.ss += d * d;
    comp += d;
  }
  // Corrected two-pass: removes the residual from rounding in the mean.
  m.ss -= comp * comp / static_cast<double>(x.size());
  if (m.ss < 0.0) m.ss = 0.0;
  m.mean += comp / static_cast<double>(x.size());
  return m;
}

}  // namespace

bool is_degenerate(double mean, double std) { return !(std > 1e-12 * std::max(1.0, std::abs(mean))); }

Standardizer fit_standardizer(const Matrix& train) {
  if (train.rows() < 2)
    throw Error(ErrorKind::TooFewSamples, fmt::format("standardizer needs >= 2 rows, got {}", train.rows()));
  Standardizer s;
  s.means.resize(train.cols());
  s.stds.resize(train.cols());
  for (std::size_t c = 0; c < train.cols(); ++c) {
    const auto col = train.column(c);
    const auto m = moments(col);
    s.means[c] = m.mean;
    s.stds[c] = std::sqrt(m.ss / static_cast<double>(col.size()));
  }
  return s;
}

Matrix transform(const Standardizer& s, const Matrix& samples) {
  if (samples.cols() != s.means.size())
    throw Error(ErrorKind::ShapeMismatch,
                fmt::format("samples have {} columns, standardizer {}", samples.cols(), s.means.size()));
  Matrix out(samples.rows(), samples.cols());
  for (std::size_t c = 0; c < samples.cols(); ++c) {
    const bool degenerate = is_degenerate(s.means[c], s.stds[c]);
    for (std::size_t r = 0; r < samples.rows(); ++r)
      out(r, c) = degenerate ? 0.0 : (samples(r, c) - s.means[c]) / s.stds[c];
  }
  return out;
}

std::optional<double> pearson(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw Error(ErrorKind::LengthMismatch, fmt::format("pearson on lengths {} and {}", a.size(), b.size()));
  if (a.size() < 2) throw Error(ErrorKind::LengthMismatch, "pearson needs at least 2 points");
  const auto ma = moments(a);
  const auto mb = moments(b);
  const double n = static_cast<double>(a.size());
  if (is_degenerate(ma.mean, std::sqrt(ma.ss / n)) || is_degenerate(mb.mean, std::sqrt(mb.ss / n)))
    return std::nullopt;
  double sab = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sab += (a[i] - ma.mean) * (b[i] - mb.mean);
  return std::clamp(sab / std::sqrt(ma.ss * mb.ss), -1.0, 1.0);
}

std::string_view to_string(PruneMode mode) {
  return mode == PruneMode::LabelRelevance ? "label_relevance" : "inter_feature_redundancy";
}

PruneMode parse_prune_mode(std::string_view text) {
  if (text == "inter_feature_redundancy" || text == "redundancy") return PruneMode::InterFeatureRedundancy;
  if (text == "label_relevance" || text == "relevance") return PruneMode::LabelRelevance;
  throw Error(ErrorKind::Config, fmt::format("unknown prune mode '{}'", text));
}

std::vector<bool> prune(const Matrix& samples, std::optional<std::span<const double>> labels, PruneMode mode,
                        double threshold) {
  if (!(threshold > 0.0 && threshold <= 1.0))
    throw Error(ErrorKind::InvalidArgument, fmt::format("prune threshold {} outside (0, 1]", threshold));
  const std::size_t d = samples.cols();
  std::vector<std::vector<double>> cols(d);
  for (std::size_t c = 0; c < d; ++c) cols[c] = samples.column(c);

  std::vector<bool> keep(d, false);
  if (mode == PruneMode::LabelRelevance) {
    if (!labels) throw Error(ErrorKind::MissingLabels, "label-relevance pruning needs labels");
    for (std::size_t c = 0; c < d; ++c) {
      const auto r = pearson(cols[c], *labels);
      keep[c] = r && std::abs(*r) >= threshold;
    }
    return keep;
  }

  for (std::size_t c = 0; c < d; ++c) {
    const auto m = moments(cols[c]);
    keep[c] = !is_degenerate(m.mean, std::sqrt(m.ss / static_cast<double>(cols[c].size())));
  }
  for (std::size_t i = 0; i < d; ++i) {
    if (!keep[i]) continue;
    for (std::size_t j = i + 1; j < d; ++j) {
      if (!keep[j]) continue;
      const auto r = pearson(cols[i], cols[j]);
      if (!r || std::abs(*r) > threshold) keep[j] = false;
    }
  }
  return keep;
}

std::vector<std::string> FeaturePipelineState::kept_names() const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < feature_names.size(); ++i)
    if (kept_mask[i]) out.push_back(feature_names[i]);
  return out;
}

std::size_t FeaturePipelineState::kept_count() const {
  return static_cast<std::size_t>(std::count(kept_mask.begin(), kept_mask.end(), true));
}

Matrix FeaturePipelineState::apply(const Matrix& samples) const {
  if (samples.cols() != feature_names.size())
    throw Error(ErrorKind::ShapeMismatch,
                fmt::format("samples have {} columns, pipeline expects {}", samples.cols(), feature_names.size()));
  std::vector<std::size_t> kept;
  for (std::size_t c = 0; c < kept_mask.size(); ++c)
    if (kept_mask[c]) kept.push_back(c);
  Matrix out(samples.rows(), kept.size());
  for (std::size_t r = 0; r < samples.rows(); ++r)
    for (std::size_t k = 0; k < kept.size(); ++k) {
      const auto c = kept[k];
      out(r, k) = (samples(r, c) - means[c]) / stds[c];
    }
  return out;
}

FeaturePipelineState fit_pipeline(std::vector<std::string> names, const Matrix& train, PruneMode mode,
                                  double threshold, std::optional<LabeledRows> relevance) {
  if (names.size() != train.cols())
    throw Error(ErrorKind::ShapeMismatch, fmt::format("{} names for {} columns", names.size(), train.cols()));
  const auto stats = fit_standardizer(train);

  FeaturePipelineState state;
  state.feature_names = std::move(names);
  state.means = stats.means;
  state.stds = stats.stds;
  state.prune_mode = mode;
  state.threshold = threshold;
  if (mode == PruneMode::LabelRelevance) {
    if (!relevance) throw Error(ErrorKind::MissingLabels, "label-relevance pruning needs labeled rows");
    if (relevance->rows.cols() != train.cols())
      throw Error(ErrorKind::ShapeMismatch, "relevance rows differ in width from training rows");
    state.kept_mask = prune(relevance->rows, relevance->labels, mode, threshold);
  } else {
    state.kept_mask = prune(train, std::nullopt, mode, threshold);
  }
  for (std::size_t c = 0; c < state.kept_mask.size(); ++c)
    if (is_degenerate(state.means[c], state.stds[c])) state.kept_mask[c] = false;
  return state;
}

void to_json(nlohmann::json& j, const FeaturePipelineState& s) {
  j = nlohmann::json{{"format", "hpcids-feature-pipeline"},
                     {"version", FeaturePipelineState::kVersion},
                     {"feature_names", s.feature_names},
                     {"means", s.means},
                     {"stds", s.stds},
                     {"kept_mask", s.kept_mask},
                     {"prune_mode", to_string(s.prune_mode)},
                     {"threshold", s.threshold}};
}

void from_json(const nlohmann::json& j, FeaturePipelineState& s) {
  if (j.at("format") != "hpcids-feature-pipeline" || j.at("version") != FeaturePipelineState::kVersion)
    throw Error(ErrorKind::Config, "unsupported feature pipeline document");
  j.at("feature_names").get_to(s.feature_names);
  j.at("means").get_to(s.means);
  j.at("stds").get_to(s.stds);
  j.at("kept_mask").get_to(s.kept_mask);
  s.prune_mode = parse_prune_mode(j.at("prune_mode").get<std::string>());
  j.at("threshold").get_to(s.threshold);
  const auto n = s.feature_names.size();
  if (s.means.size() != n || s.stds.size() != n || s.kept_mask.size() != n)
    throw Error(ErrorKind::Config, "feature pipeline arrays differ in length");
}

}  // namespace hpcids
