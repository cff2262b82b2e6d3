// Command-line front end: gen -> attack -> emulate -> train -> detect, plus
// ingest for real gem5 stats dumps and sweep for the training-fraction study.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "hpcids/config.hpp"
#include "hpcids/stats_ingest.hpp"

namespace fs = std::filesystem;
using namespace hpcids;

namespace {

struct GlobalOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  bool strict = false;
};

RunConfig resolve_config(const GlobalOptions& g) {
  RunConfig config = g.config_path.empty() ? RunConfig{} : load_config(fs::path(g.config_path));
  if (g.seed) config.seed = *g.seed;
  config.derive_seeds();
  validate(config);
  return config;
}

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, fmt::format("cannot open '{}'", path));
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorKind::Io, fmt::format("cannot write '{}'", path));
  return out;
}

std::vector<CanFrame> read_frames(const std::string& path, bool strict) {
  auto in = open_in(path);
  auto log = parse_csv(in, ParseOptions{strict});
  for (const auto& d : log.diagnostics) std::cerr << fmt::format("{}:{}: skipped: {}\n", path, d.line, d.message);
  return std::move(log.frames);
}

void write_frames(const std::string& path, std::span<const CanFrame> frames) {
  auto out = open_out(path);
  write_csv(frames, out);
}

CounterTable read_counters(const std::string& path) {
  auto in = open_in(path);
  return read_counters_csv(in);
}

void write_counters(const std::string& path, const CounterTable& table) {
  auto out = open_out(path);
  write_counters_csv(table, out);
}

std::vector<std::string> read_name_list(const std::string& path) {
  auto in = open_in(path);
  std::vector<std::string> names;
  std::string line;
  while (std::getline(in, line)) {
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos || line[b] == '#') continue;
    const auto e = line.find_last_not_of(" \t\r");
    names.push_back(line.substr(b, e - b + 1));
  }
  return names;
}

nlohmann::json metrics_json(const Metrics& m) {
  auto v = [](const std::optional<double>& x) { return x ? nlohmann::json(*x) : nlohmann::json(nullptr); };
  return {{"accuracy", v(m.accuracy)}, {"precision", v(m.precision)}, {"recall", v(m.recall)},
          {"f1", v(m.f1)},             {"fpr", v(m.fpr)}};
}

void cmd_gen(const GlobalOptions& g, const std::string& out) {
  const auto config = resolve_config(g);
  const auto frames = generate_benign(config.traffic);
  write_frames(out, frames);
  std::cerr << fmt::format("gen: {} frames over {} s\n", frames.size(), config.traffic.duration);
}

void cmd_attack(const GlobalOptions& g, const std::string& in, const std::string& out, const std::string& delays) {
  const auto config = resolve_config(g);
  const auto ready = read_frames(in, g.strict);
  const auto mixed = inject_dos(ready, config.dos);
  const auto schedule = arbitrate(mixed, BusModel{config.timing});
  write_frames(out, transmitted_frames(schedule));
  std::cerr << fmt::format("attack: {} benign + {} injected frames\n", ready.size(), mixed.size() - ready.size());
  if (!delays.empty()) {
    auto os = open_out(delays);
    os << "id_hex,count,mean_delay_s,max_delay_s\n";
    for (const auto& [id, st] : delay_stats(schedule))
      os << fmt::format("{:03X},{},{},{}\n", id, st.count, st.mean, st.max);
  }
}

void cmd_emulate(const GlobalOptions& g, const std::string& in, const std::string& out) {
  const auto config = resolve_config(g);
  const auto frames = read_frames(in, g.strict);
  const auto schedule = schedule_from_transmitted(frames, config.timing);
  const auto table = run_receiver(schedule, config.receiver);
  for (const auto& s : table.samples)
    if (const auto v = check_consistency(table, s))
      throw Error(ErrorKind::InvalidArgument,
                  fmt::format("window {}: {} + {} != {}", s.window_id, v->hits, v->misses, v->accesses));
  write_counters(out, table);
  std::cerr << fmt::format("emulate: {} frames -> {} windows\n", frames.size(), table.samples.size());
}

void cmd_ingest(const std::string& stats, const std::string& labels, const std::string& names_path,
                const std::string& out) {
  auto stats_in = open_in(stats);
  const auto dump = parse_stats(stats_in);
  for (const auto& d : dump.diagnostics) std::cerr << fmt::format("{}:{}: {}\n", stats, d.line, d.message);
  auto labels_in = open_in(labels);
  const auto label_list = read_labels(labels_in);
  const auto names = names_path.empty() ? selected_event_names() : read_name_list(names_path);
  const auto matrix = select_events(dump, names);
  const auto result = samples_from_stats(matrix, label_list);
  for (const auto& d : result.diagnostics) std::cerr << fmt::format("{}: {}\n", stats, d.message);
  write_counters(out, result.table);
  std::cerr << fmt::format("ingest: {} sections -> {} samples\n", dump.sections.size(), result.table.samples.size());
}

void cmd_train(const GlobalOptions& g, const std::string& in, const std::string& model_out,
               std::optional<double> fraction, const std::string& holdout_out) {
  const auto config = resolve_config(g);
  const auto table = read_counters(in);

  std::vector<std::size_t> benign_rows;
  std::size_t excluded = 0;
  for (std::size_t i = 0; i < table.samples.size(); ++i) {
    if (table.samples[i].label == SampleLabel::Attack)
      ++excluded;
    else
      benign_rows.push_back(i);
  }
  if (excluded) std::cerr << fmt::format("train: excluded {} attack rows from fitting\n", excluded);

  std::vector<std::size_t> train_rows = benign_rows;
  if (fraction) {
    // Reproduce the sweep's split of the benign rows for this fraction.
    const auto plan = SplitPlan::make(benign_rows.size(), config.sweep.holdout, config.sweep.seed);
    train_rows.clear();
    for (auto k : plan.train(*fraction)) train_rows.push_back(benign_rows[k]);
    if (!holdout_out.empty()) {
      CounterTable holdout{table.names, {}};
      for (auto k : plan.benign_test()) holdout.samples.push_back(table.samples[benign_rows[k]]);
      write_counters(holdout_out, holdout);
    }
  }

  const Matrix train_matrix = to_matrix(table, train_rows);
  std::optional<Matrix> relevance_rows;
  std::vector<double> relevance_labels;
  std::optional<LabeledRows> relevance;
  if (config.sweep.detector.prune_mode == PruneMode::LabelRelevance) {
    relevance_rows = train_matrix;
    relevance_labels.assign(train_rows.size(), 0.0);
    for (const auto& s : table.samples) {
      if (s.label != SampleLabel::Attack) continue;
      relevance_rows->append_row(s.values);
      relevance_labels.push_back(1.0);
    }
    relevance.emplace(LabeledRows{*relevance_rows, relevance_labels});
  }

  const auto model = fit_detector(table.names, train_matrix, config.sweep.detector, relevance);
  if (!model.ocsvm.converged)
    std::cerr << fmt::format("train: warning: solver stopped at the iteration cap ({})\n", model.ocsvm.iterations);
  auto out = open_out(model_out);
  out << nlohmann::json(model).dump(2) << '\n';
  std::cerr << fmt::format("train: {} rows, {} features kept, {} support vectors\n", train_rows.size(),
                           model.features.kept_count(), model.ocsvm.alphas.size());
}

void cmd_detect(const std::vector<std::string>& inputs, const std::string& model_path, const std::string& out) {
  DetectorModel model;
  {
    auto in = open_in(model_path);
    model = nlohmann::json::parse(in).get<DetectorModel>();
  }

  CounterTable table;
  for (const auto& path : inputs) {
    auto part = read_counters(path);
    if (part.names != model.features.feature_names)
      throw Error(ErrorKind::ShapeMismatch, fmt::format("'{}' counters differ from the model's features", path));
    table.names = part.names;
    for (auto& s : part.samples) table.samples.push_back(std::move(s));
  }

  const auto decisions = model.decision(to_matrix(table));
  auto verdicts = nlohmann::json::array();
  bool labeled = !table.samples.empty();
  std::vector<SampleLabel> labels;
  for (std::size_t i = 0; i < table.samples.size(); ++i) {
    const auto& s = table.samples[i];
    labeled = labeled && s.label != SampleLabel::Unknown;
    labels.push_back(s.label);
    verdicts.push_back({{"window_id", s.window_id},
                        {"label", to_string(s.label)},
                        {"decision", decisions[i]},
                        {"verdict", verdict(decisions[i], model.ocsvm.band()) == Verdict::Normal ? "normal" : "anomaly"}});
  }
  nlohmann::json doc{{"format", "hpcids-detect-report"}, {"version", 1}, {"verdicts", verdicts}};
  if (labeled) {
    const auto counts = confusion(decisions, labels, model.ocsvm.band());
    doc["confusion"] = {{"tp", counts.tp}, {"fp", counts.fp}, {"tn", counts.tn}, {"fn", counts.fn}};
    doc["metrics"] = metrics_json(metrics(counts));
  }
  auto os = open_out(out);
  os << doc.dump(2) << '\n';
  std::size_t anomalies = 0;
  for (double d : decisions) anomalies += verdict(d, model.ocsvm.band()) == Verdict::Anomaly;
  std::cerr << fmt::format("detect: {} of {} samples flagged\n", anomalies, decisions.size());
}

void cmd_sweep(const GlobalOptions& g, const std::string& benign_path, const std::string& attack_path,
               const std::string& out, const std::string& series_prefix) {
  const auto config = resolve_config(g);
  auto benign = read_counters(benign_path);
  auto attack = read_counters(attack_path);
  // Benign file rows labeled attack (and vice versa) are not usable as ground truth.
  std::erase_if(benign.samples, [](const CounterSample& s) { return s.label == SampleLabel::Attack; });
  std::erase_if(attack.samples, [](const CounterSample& s) { return s.label == SampleLabel::Benign; });

  const auto report = run_sweep(benign, attack, config.sweep);
  auto os = open_out(out);
  if (fs::path(out).extension() == ".csv")
    write_report_csv(report, os);
  else
    write_report_json(report, os);
  if (!series_prefix.empty()) {
    auto acc = open_out(series_prefix + "_accuracy.csv");
    write_series(report, SeriesMetric::Accuracy, acc);
    auto f1 = open_out(series_prefix + "_f1.csv");
    write_series(report, SeriesMetric::F1, f1);
  }
  for (const auto& r : report.rows)
    std::cerr << fmt::format("sweep: fraction {:.2f} train {} accuracy {:.4f} f1 {:.4f}\n", r.fraction, r.train_size,
                             r.metrics.accuracy.value_or(0.0), r.metrics.f1.value_or(0.0));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HPC-based CAN DoS intrusion detection pipeline"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions g;
  std::uint64_t seed = 0;
  app.add_option("--config", g.config_path, "INI run configuration")->check(CLI::ExistingFile);
  auto* seed_opt = app.add_option("--seed", seed, "Root seed; overrides the config file");
  app.add_flag("--strict", g.strict, "Abort on the first malformed input record");

  std::string in, out, delays, stats, labels, names, model, benign, attack, holdout_out, series;
  std::vector<std::string> inputs;
  double fraction = 0.0;

  auto* gen = app.add_subcommand("gen", "Generate benign periodic traffic as a frame CSV");
  gen->add_option("-o,--out", out)->required();

  auto* atk = app.add_subcommand("attack", "Inject the identifier-0 flood and arbitrate the bus");
  atk->add_option("-i,--in", in)->required()->check(CLI::ExistingFile);
  atk->add_option("-o,--out", out)->required();
  atk->add_option("--delays", delays, "Per-identifier queueing delay CSV");

  auto* emu = app.add_subcommand("emulate", "Run the instrumented receiver ECU over a transmitted frame CSV");
  emu->add_option("-i,--in", in)->required()->check(CLI::ExistingFile);
  emu->add_option("-o,--out", out)->required();

  auto* ing = app.add_subcommand("ingest", "Convert a gem5 stats.txt into a counters CSV");
  ing->add_option("--stats", stats)->required()->check(CLI::ExistingFile);
  ing->add_option("--labels", labels, "One label per stats section")->required()->check(CLI::ExistingFile);
  ing->add_option("--names", names, "Event names, one per line (default: the 16 selected events)")
      ->check(CLI::ExistingFile);
  ing->add_option("-o,--out", out)->required();

  auto* trn = app.add_subcommand("train", "Fit the feature pipeline and one-class SVM on benign rows");
  trn->add_option("-i,--in", in)->required()->check(CLI::ExistingFile);
  trn->add_option("-o,--out", out)->required();
  auto* frac_opt = trn->add_option("--fraction", fraction, "Train on the sweep split for this fraction");
  trn->add_option("--holdout-out", holdout_out, "With --fraction, write the benign holdout rows here");

  auto* det = app.add_subcommand("detect", "Score counters with a trained model");
  det->add_option("-i,--in", inputs)->required()->check(CLI::ExistingFile);
  det->add_option("-m,--model", model)->required()->check(CLI::ExistingFile);
  det->add_option("-o,--out", out)->required();

  auto* swp = app.add_subcommand("sweep", "Training-fraction sweep over benign and attack counters");
  swp->add_option("--benign", benign)->required()->check(CLI::ExistingFile);
  swp->add_option("--attack", attack)->required()->check(CLI::ExistingFile);
  swp->add_option("-o,--out", out, "Report path; .csv for CSV, JSON otherwise")->required();
  swp->add_option("--series", series, "Also write <prefix>_accuracy.csv and <prefix>_f1.csv");

  CLI11_PARSE(app, argc, argv);
  if (seed_opt->count()) g.seed = seed;

  try {
    if (*gen) cmd_gen(g, out);
    if (*atk) cmd_attack(g, in, out, delays);
    if (*emu) cmd_emulate(g, in, out);
    if (*ing) cmd_ingest(stats, labels, names, out);
    if (*trn) cmd_train(g, in, out, frac_opt->count() ? std::optional<double>(fraction) : std::nullopt, holdout_out);
    if (*det) cmd_detect(inputs, model, out);
    if (*swp) cmd_sweep(g, benign, attack, out, series);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
