#include "hpcids/eval.hpp"

#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hpcids/rng.hpp"
#include "text_util.hpp"

namespace hpcids {

namespace {

std::optional<double> ratio(double num, double den) {
  if (den == 0.0) return std::nullopt;
  return num / den;
}

std::size_t floor_share(double share, std::size_t n) {
  return static_cast<std::size_t>(std::floor(share * static_cast<double>(n) + 1e-9));
}

}  // namespace

Metrics metrics(const ConfusionCounts& c) {
  if (c.total() == 0) throw Error(ErrorKind::EmptyCounts, "no scored samples");
  const auto tp = static_cast<double>(c.tp);
  const auto fp = static_cast<double>(c.fp);
  const auto tn = static_cast<double>(c.tn);
  const auto fn = static_cast<double>(c.fn);
  Metrics m;
  m.accuracy = ratio(tp + tn, static_cast<double>(c.total()));
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(tp, tp + 0.5 * (fn + fp));
  m.fpr = ratio(fp, fp + tn);
  return m;
}

Matrix to_matrix(const CounterTable& table) {
  Matrix m(table.samples.size(), table.names.size());
  for (std::size_t r = 0; r < table.samples.size(); ++r)
    std::copy(table.samples[r].values.begin(), table.samples[r].values.end(), m.row(r).begin());
  return m;
}

Matrix to_matrix(const CounterTable& table, std::span<const std::size_t> rows) {
  Matrix m(rows.size(), table.names.size());
  for (std::size_t r = 0; r < rows.size(); ++r) {
    const auto& v = table.samples.at(rows[r]).values;
    std::copy(v.begin(), v.end(), m.row(r).begin());
  }
  return m;
}

std::vector<double> DetectorModel::decision(const Matrix& raw) const { return ocsvm.decision(features.apply(raw)); }

DetectorModel fit_detector(const std::vector<std::string>& names, const Matrix& train_rows,
                           const DetectorConfig& config, std::optional<LabeledRows> relevance) {
  DetectorModel model;
  model.features = fit_pipeline(names, train_rows, config.prune_mode, config.prune_threshold, relevance);
  if (model.features.kept_count() == 0)
    throw Error(ErrorKind::InsufficientData, "feature pruning kept no features");
  model.ocsvm = train(model.features.apply(train_rows), config.ocsvm);
  return model;
}

void to_json(nlohmann::json& j, const DetectorModel& m) {
  j = nlohmann::json{{"format", "hpcids-detector"},
                     {"version", DetectorModel::kVersion},
                     {"features", m.features},
                     {"ocsvm", m.ocsvm}};
}

void from_json(const nlohmann::json& j, DetectorModel& m) {
  if (j.at("format") != "hpcids-detector" || j.at("version") != DetectorModel::kVersion)
    throw Error(ErrorKind::Config, "unsupported detector model document");
  j.at("features").get_to(m.features);
  j.at("ocsvm").get_to(m.ocsvm);
  if (m.ocsvm.support_vectors.cols() != m.features.kept_count())
    throw Error(ErrorKind::Config, "model feature count differs from pipeline");
}

ConfusionCounts confusion(std::span<const double> decisions, std::span<const SampleLabel> labels, double band) {
  if (decisions.size() != labels.size())
    throw Error(ErrorKind::LengthMismatch, fmt::format("{} decisions for {} labels", decisions.size(), labels.size()));
  ConfusionCounts c;
  for (std::size_t i = 0; i < decisions.size(); ++i) {
    const bool flagged = verdict(decisions[i], band) == Verdict::Anomaly;
    switch (labels[i]) {
      case SampleLabel::Attack: ++(flagged ? c.tp : c.fn); break;
      case SampleLabel::Benign: ++(flagged ? c.fp : c.tn); break;
      case SampleLabel::Unknown:
        throw Error(ErrorKind::MissingLabels, fmt::format("sample {} has no label", i));
    }
  }
  return c;
}

std::vector<double> SweepConfig::default_fractions() {
  std::vector<double> f;
  for (int pct = 20; pct <= 95; pct += 5) f.push_back(pct / 100.0);
  return f;
}

void validate(const SweepConfig& config) {
  if (config.fractions.empty()) throw Error(ErrorKind::InvalidArgument, "no training fractions");
  if (!(config.holdout > 0.0 && config.holdout < 1.0))
    throw Error(ErrorKind::InvalidArgument, fmt::format("holdout {} outside (0, 1)", config.holdout));
  for (std::size_t i = 0; i < config.fractions.size(); ++i) {
    const double f = config.fractions[i];
    if (!(f > 0.0 && f < 1.0))
      throw Error(ErrorKind::InvalidArgument, fmt::format("fraction {} outside (0, 1)", f));
    if (f + config.holdout > 1.0 + 1e-9)
      throw Error(ErrorKind::InvalidArgument, fmt::format("fraction {} + holdout {} exceeds 1", f, config.holdout));
    if (i > 0 && !(f > config.fractions[i - 1]))
      throw Error(ErrorKind::InvalidArgument, "fractions must be strictly increasing");
  }
  validate(config.detector.ocsvm);
}

SplitPlan SplitPlan::make(std::size_t n, double holdout, std::uint64_t seed) {
  SplitPlan plan;
  plan.order.resize(n);
  std::iota(plan.order.begin(), plan.order.end(), std::size_t{0});
  XorShift64 rng(stage_seed(seed, "split"));
  for (std::size_t i = n; i > 1; --i) std::swap(plan.order[i - 1], plan.order[rng.below(i)]);
  plan.holdout_count = floor_share(holdout, n);
  if (plan.holdout_count == 0)
    throw Error(ErrorKind::InsufficientData, fmt::format("holdout {} of {} benign samples is empty", holdout, n));
  return plan;
}

std::size_t SplitPlan::train_count(double fraction) const {
  return std::min(floor_share(fraction, order.size()), order.size() - holdout_count);
}

std::vector<std::size_t> SplitPlan::benign_test() const {
  return {order.begin(), order.begin() + static_cast<std::ptrdiff_t>(holdout_count)};
}

std::vector<std::size_t> SplitPlan::train(double fraction) const {
  const auto k = train_count(fraction);
  if (k == 0) throw Error(ErrorKind::InsufficientData, fmt::format("fraction {} leaves no training rows", fraction));
  const auto first = order.begin() + static_cast<std::ptrdiff_t>(holdout_count);
  return {first, first + static_cast<std::ptrdiff_t>(k)};
}

Split split(std::size_t n, double fraction, double holdout, std::uint64_t seed) {
  const auto plan = SplitPlan::make(n, holdout, seed);
  return {plan.train(fraction), plan.benign_test()};
}

EvalReport run_sweep(const CounterTable& benign, const CounterTable& attack, const SweepConfig& config) {
  validate(config);
  if (benign.samples.empty() || attack.samples.empty())
    throw Error(ErrorKind::InsufficientData, "sweep needs both benign and attack samples");
  if (benign.names != attack.names)
    throw Error(ErrorKind::ShapeMismatch, "benign and attack samples carry different counters");

  const auto plan = SplitPlan::make(benign.samples.size(), config.holdout, config.seed);
  const auto test_rows = plan.benign_test();
  const Matrix benign_test = to_matrix(benign, test_rows);
  const Matrix attack_all = to_matrix(attack);

  // Scored set: benign holdout (negatives) followed by every attack sample.
  std::vector<SampleLabel> truth(test_rows.size(), SampleLabel::Benign);
  truth.resize(test_rows.size() + attack_all.rows(), SampleLabel::Attack);

  EvalReport report;
  for (const double fraction : config.fractions) {
    try {
      const auto train_rows = plan.train(fraction);
      const Matrix train = to_matrix(benign, train_rows);

      std::optional<Matrix> relevance_rows;
      std::vector<double> relevance_labels;
      std::optional<LabeledRows> relevance;
      if (config.detector.prune_mode == PruneMode::LabelRelevance) {
        // Relevance to the class label needs both classes: training rows
        // plus the attack set. Standardization stays train-only.
        relevance_rows = train;
        for (std::size_t r = 0; r < attack_all.rows(); ++r) relevance_rows->append_row(attack_all.row(r));
        relevance_labels.assign(train.rows(), 0.0);
        relevance_labels.resize(relevance_rows->rows(), 1.0);
        relevance.emplace(LabeledRows{*relevance_rows, relevance_labels});
      }

      const auto model = fit_detector(benign.names, train, config.detector, relevance);
      auto decisions = model.decision(benign_test);
      const auto attack_decisions = model.decision(attack_all);
      decisions.insert(decisions.end(), attack_decisions.begin(), attack_decisions.end());

      SweepRow row;
      row.fraction = fraction;
      row.counts = confusion(decisions, truth, model.ocsvm.band());
      row.metrics = metrics(row.counts);
      row.kept_features = model.features.kept_names();
      row.train_size = train_rows.size();
      row.benign_test_size = test_rows.size();
      row.attack_test_size = attack_all.rows();
      row.converged = model.ocsvm.converged;
      report.rows.push_back(std::move(row));
    } catch (const Error& e) {
      throw Error(e.kind(), fmt::format("fraction {}: {}", fraction, e.what()));
    }
  }
  return report;
}

namespace {

std::string cell(const std::optional<double>& v) { return v ? fmt::format("{}", *v) : std::string(); }

nlohmann::json opt_json(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::optional<double> opt_from(const nlohmann::json& j) {
  if (j.is_null()) return std::nullopt;
  return j.get<double>();
}

}  // namespace

void write_report_csv(const EvalReport& report, std::ostream& out) {
  out << kReportCsvHeader << '\n';
  for (const auto& r : report.rows) {
    const auto& m = r.metrics;
    out << fmt::format("{},{},{},{},{},{},{},{},{},{}\n", r.fraction, r.counts.tp, r.counts.fp, r.counts.tn,
                       r.counts.fn, cell(m.accuracy), cell(m.precision), cell(m.recall), cell(m.f1), cell(m.fpr));
  }
  if (!out) throw Error(ErrorKind::Io, "report CSV write failed");
}

void write_report_json(const EvalReport& report, std::ostream& out) {
  auto rows = nlohmann::json::array();
  for (const auto& r : report.rows) {
    rows.push_back({{"fraction", r.fraction},
                    {"tp", r.counts.tp},
                    {"fp", r.counts.fp},
                    {"tn", r.counts.tn},
                    {"fn", r.counts.fn},
                    {"accuracy", opt_json(r.metrics.accuracy)},
                    {"precision", opt_json(r.metrics.precision)},
                    {"recall", opt_json(r.metrics.recall)},
                    {"f1", opt_json(r.metrics.f1)},
                    {"fpr", opt_json(r.metrics.fpr)},
                    {"kept_features", r.kept_features},
                    {"train_size", r.train_size},
                    {"benign_test_size", r.benign_test_size},
                    {"attack_test_size", r.attack_test_size},
                    {"converged", r.converged}});
  }
  const nlohmann::json doc{{"format", "hpcids-eval-report"}, {"version", 1}, {"rows", rows}};
  out << doc.dump(2) << '\n';
  if (!out) throw Error(ErrorKind::Io, "report JSON write failed");
}

EvalReport read_report_json(std::istream& in) {
  const auto doc = nlohmann::json::parse(in);
  if (doc.at("format") != "hpcids-eval-report") throw Error(ErrorKind::Config, "not an evaluation report");
  EvalReport report;
  for (const auto& j : doc.at("rows")) {
    SweepRow r;
    j.at("fraction").get_to(r.fraction);
    j.at("tp").get_to(r.counts.tp);
    j.at("fp").get_to(r.counts.fp);
    j.at("tn").get_to(r.counts.tn);
    j.at("fn").get_to(r.counts.fn);
    r.metrics = {opt_from(j.at("accuracy")), opt_from(j.at("precision")), opt_from(j.at("recall")),
                 opt_from(j.at("f1")), opt_from(j.at("fpr"))};
    j.at("kept_features").get_to(r.kept_features);
    j.at("train_size").get_to(r.train_size);
    j.at("benign_test_size").get_to(r.benign_test_size);
    j.at("attack_test_size").get_to(r.attack_test_size);
    j.at("converged").get_to(r.converged);
    report.rows.push_back(std::move(r));
  }
  return report;
}

EvalReport read_report_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line) != kReportCsvHeader)
    throw Error(ErrorKind::HeaderMismatch, fmt::format("expected header '{}'", kReportCsvHeader));
  EvalReport report;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    const auto text = detail::trim(line);
    if (text.empty()) continue;
    const auto f = detail::split(text, ',');
    auto bad = [&] { return Error(ErrorKind::MalformedRecord, fmt::format("report line {}", line_no)); };
    if (f.size() != 10) throw bad();
    SweepRow r;
    const auto fraction = detail::parse_double(f[0]);
    const auto tp = detail::parse_int<std::uint64_t>(f[1]);
    const auto fp = detail::parse_int<std::uint64_t>(f[2]);
    const auto tn = detail::parse_int<std::uint64_t>(f[3]);
    const auto fn = detail::parse_int<std::uint64_t>(f[4]);
    if (!fraction || !tp || !fp || !tn || !fn) throw bad();
    r.fraction = *fraction;
    r.counts = {*tp, *fp, *tn, *fn};
    std::optional<double>* slots[] = {&r.metrics.accuracy, &r.metrics.precision, &r.metrics.recall, &r.metrics.f1,
                                      &r.metrics.fpr};
    for (std::size_t k = 0; k < 5; ++k) {
      if (f[5 + k].empty()) continue;
      const auto v = detail::parse_double(f[5 + k]);
      if (!v) throw bad();
      *slots[k] = *v;
    }
    report.rows.push_back(std::move(r));
  }
  return report;
}

void write_series(const EvalReport& report, SeriesMetric metric, std::ostream& out) {
  out << (metric == SeriesMetric::Accuracy ? "fraction,accuracy\n" : "fraction,f1\n");
  for (const auto& r : report.rows) {
    const auto& v = metric == SeriesMetric::Accuracy ? r.metrics.accuracy : r.metrics.f1;
    out << fmt::format("{},{}\n", r.fraction, cell(v));
  }
}

}  // namespace hpcids
