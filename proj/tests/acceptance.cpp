// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any
// criterion fails. Detail lines are indented.

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <future>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "hpcids/aes.hpp"
#include "hpcids/cache.hpp"
#include "hpcids/ecu.hpp"
#include "hpcids/eval.hpp"
#include "hpcids/features.hpp"
#include "hpcids/ocsvm.hpp"
#include "hpcids/rng.hpp"
#include "hpcids/stats_ingest.hpp"
#include "hpcids/traffic.hpp"
#include "support/oracles.hpp"

using namespace hpcids;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Outcome {
  bool pass = true;
  std::vector<std::string> notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes.push_back("failed: " + what);
    }
  }
  void note(const std::string& what) { notes.push_back(what); }
};

int failures = 0;

void report(const std::string& name, const std::function<void(Outcome&)>& body) {
  Outcome out;
  try {
    body(out);
  } catch (const std::exception& e) {
    out.pass = false;
    out.notes.push_back(std::string("exception: ") + e.what());
  }
  fmt::print("{} {}\n", out.pass ? "PASS" : "FAIL", name);
  for (const auto& n : out.notes) fmt::print("    {}\n", n);
  std::fflush(stdout);
  failures += !out.pass;
}

aes::Block hex_block(const std::string& hex) {
  aes::Block b{};
  for (std::size_t i = 0; i < 16; ++i) b[i] = static_cast<std::uint8_t>(std::stoul(hex.substr(2 * i, 2), nullptr, 16));
  return b;
}

// ---- criteria ---------------------------------------------------------------

void aes_criterion(Outcome& out) {
  const auto t0 = Clock::now();
  out.require(aes::encrypt(aes::AesState(hex_block("000102030405060708090a0b0c0d0e0f")),
                           hex_block("00112233445566778899aabbccddeeff")) == hex_block("69c4e0d86a7b0430d8cdb78070b4c55a"),
              "FIPS-197 example vector");
  out.require(aes::encrypt(aes::AesState(aes::Key{}), aes::Block{}) == hex_block("66e94bd4ef8a2c3b884cfa59ca342b2e"),
              "all-zero vector");
  XorShift64 rng(1);
  int ok = 0;
  for (int i = 0; i < 1000; ++i) {
    aes::Key key;
    aes::Block block;
    for (auto& b : key) b = rng.next_byte();
    for (auto& b : block) b = rng.next_byte();
    const aes::AesState state(key);
    ok += oracle::decrypt(state, aes::encrypt(state, block)) == block;
  }
  out.require(ok == 1000, fmt::format("{} / 1000 round-trips", ok));
  const double t = seconds_since(t0);
  out.require(t < 1.0, fmt::format("runtime {:.3f} s", t));
  out.note(fmt::format("1000 round-trips in {:.3f} s", t));
}

void cache_criterion(Outcome& out, const std::vector<const CounterTable*>& emulator_runs) {
  int traces = 0;
  for (const auto& g : {CacheConfig{}.l1i, CacheConfig{}.l1d, CacheConfig{}.l2}) {
    const std::uint64_t stride = std::uint64_t{g.num_sets()} * g.line_size;
    const std::uint64_t a = 0x8000'0000, b = a + stride, c = a + 2 * stride;
    const bool two_way = g.associativity == 2;
    const std::vector<std::pair<std::vector<std::uint64_t>, std::string>> cases = {
        {{a, b, c, a}, two_way ? "MMMM" : "MMMH"},
        {{a, b, a, c, a, b}, two_way ? "MMHMHM" : "MMHMHH"},
        {{a, a + 1, a + g.line_size - 1, a + g.line_size}, "MHHM"},
        {{a, a + g.line_size, a + 2 * g.line_size, a, a + g.line_size}, "MMMHH"},
        {{a, a, a}, "MHH"},
        {{a, b, a, c, b, a}, two_way ? "MMHMMM" : "MMHMHH"},
    };
    for (const auto& [addrs, expect] : cases) {
      CacheLevel level(g);
      std::string got;
      for (auto addr : addrs) got += level.access(addr) ? 'H' : 'M';
      out.require(got == expect, fmt::format("{}-way trace: got {} expected {}", g.associativity, got, expect));
      ++traces;
    }
  }
  std::size_t samples = 0, violations = 0;
  for (const auto* table : emulator_runs)
    for (const auto& s : table->samples) {
      ++samples;
      violations += check_consistency(*table, s).has_value();
    }
  out.require(violations == 0, fmt::format("{} samples violate hits + misses == accesses", violations));
  out.note(fmt::format("{} hand traces over L1I/L1D/L2; {} emulator samples consistent", traces, samples));
}

void standardizer_criterion(Outcome& out) {
  double worst_mean = 0.0, worst_std = 0.0;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    auto m = oracle::gaussian(100 + 10 * seed, 5, seed, 50.0 * seed, 3.0 + seed);
    for (std::size_t r = 0; r < m.rows(); ++r) m(r, 4) = 1e9 + 1e3 * m(r, 4);
    const auto s = fit_standardizer(m);
    const auto z = transform(s, m);
    for (std::size_t c = 0; c < z.cols(); ++c) {
      const auto col = z.column(c);
      const double mean = std::accumulate(col.begin(), col.end(), 0.0) / col.size();
      double var = 0.0;
      for (double v : col) var += (v - mean) * (v - mean);
      worst_mean = std::max(worst_mean, std::abs(mean));
      worst_std = std::max(worst_std, std::abs(std::sqrt(var / col.size()) - 1.0));
    }
  }
  out.require(worst_mean <= 1e-9, fmt::format("column mean off by {:.3g}", worst_mean));
  out.require(worst_std <= 1e-9, fmt::format("column std off by {:.3g}", worst_std));

  Matrix wide(300, 3);
  for (std::size_t r = 0; r < wide.rows(); ++r) {
    const double u = static_cast<double>(r) / wide.rows();
    wide(r, 0) = 1e-7 * (1.0 + u);
    wide(r, 1) = std::pow(10.0, -7.0 + 17.0 * u);
    wide(r, 2) = 1e10 * (1.0 + u);
  }
  const auto z = transform(fit_standardizer(wide), wide);
  bool finite = true;
  for (std::size_t r = 0; r < z.rows(); ++r)
    for (std::size_t c = 0; c < z.cols(); ++c) finite = finite && std::isfinite(z(r, c));
  out.require(finite, "1e-7..1e10 inputs produced non-finite output");
  out.note(fmt::format("max |mean| {:.2g}, max |std-1| {:.2g}", worst_mean, worst_std));
}

void pruning_criterion(Outcome& out) {
  const auto g = oracle::gaussian(200, 2, 3);
  Matrix m(200, 4);
  for (std::size_t r = 0; r < 200; ++r) {
    m(r, 0) = g(r, 0);
    m(r, 1) = g(r, 0);  // duplicate
    m(r, 2) = 1.0;      // constant
    m(r, 3) = g(r, 1);
  }
  const auto kept = prune(m, std::nullopt, PruneMode::InterFeatureRedundancy, 0.9);
  out.require(kept == std::vector<bool>{true, false, false, true}, "duplicate/constant columns not dropped");
  const std::vector<double> a = {1, 2, 3}, b = {1, 2, 4};
  const auto r = pearson(a, b);
  out.require(r && std::abs(*r - 0.98198) <= 1e-5, "pearson([1,2,3],[1,2,4])");
  out.note(fmt::format("pearson = {:.6f}", r.value_or(NAN)));
}

void ocsvm_criterion(Outcome& out) {
  const auto t0 = Clock::now();
  double worst_obj = 0.0, worst_agree = 1.0, worst_sum = 0.0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const std::size_t n = 12 + (seed * 13) % 53;
    const std::size_t dims = 1 + seed % 5;
    auto x = oracle::gaussian(n, dims, 1000 + seed);
    if (seed % 2)
      for (std::size_t r = 0; r < n; r += 5) x(r, 0) += 4.0;
    // Solved tight: on 1-D sets the decision surface stays within 1e-4 of
    // zero over a wide band, so the default tolerance cannot settle signs.
    OcsvmConfig cfg;
    cfg.tolerance = 1e-8;
    const double gamma = resolve_gamma(cfg, dims);
    const auto dual = solve_dual(x, cfg);
    const auto ref = oracle::solve_ocsvm_dual(x, cfg.nu, gamma);
    worst_obj = std::max(worst_obj, std::abs(dual.objective() - ref.objective) / ref.objective);
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(dual.alpha.begin(), dual.alpha.end(), 0.0) - 1.0));
    const auto model = model_from_dual(x, dual, cfg);
    const auto probe = oracle::gaussian(200, dims, 5000 + seed, 0.0, 1.5);
    std::size_t agree = 0, counted = 0;
    for (const Matrix* set : {static_cast<const Matrix*>(&x), &probe})
      for (std::size_t r = 0; r < set->rows(); ++r) {
        ++counted;
        // Margin points sit at zero in both solutions; count them as Normal.
        agree += model.predict(set->row(r)) == verdict(oracle::decision(x, ref, gamma, set->row(r)), 1e-6);
      }
    worst_agree = std::min(worst_agree, static_cast<double>(agree) / counted);
  }
  out.require(worst_obj <= 1e-4, fmt::format("objective relative gap {:.3g}", worst_obj));
  out.require(worst_agree >= 0.99, fmt::format("prediction agreement {:.4f}", worst_agree));
  out.require(worst_sum <= 1e-6, fmt::format("|sum alpha - 1| = {:.3g}", worst_sum));

  for (std::size_t n : {100u, 400u, 1000u}) {
    const auto x = oracle::gaussian(n, 4, 77 + n);
    const auto m = train(x, {});
    std::size_t anomalies = 0;
    for (std::size_t r = 0; r < n; ++r) anomalies += m.predict(x.row(r)) == Verdict::Anomaly;
    const double slack = 2.0 / std::sqrt(static_cast<double>(n));
    const double frac_out = static_cast<double>(anomalies) / n;
    const double frac_sv = static_cast<double>(m.alphas.size()) / n;
    out.require(frac_out <= 0.2 + slack, fmt::format("n={} anomaly fraction {:.3f}", n, frac_out));
    out.require(frac_sv >= 0.2 - slack, fmt::format("n={} support-vector fraction {:.3f}", n, frac_sv));
    out.note(fmt::format("n={}: anomalies {:.3f}, support vectors {:.3f}", n, frac_out, frac_sv));
  }
  const double t = seconds_since(t0);
  out.require(t < 60.0, fmt::format("runtime {:.1f} s", t));
  out.note(fmt::format("30 oracle instances: objective gap <= {:.2g}, agreement >= {:.4f}; {:.1f} s", worst_obj,
                       worst_agree, t));
}

void metrics_criterion(Outcome& out) {
  const auto m = metrics({50, 25, 100, 25});
  out.require(m.f1 == 2.0 / 3.0, "f1(50,25,25)");
  out.require(m.accuracy == 0.75, "accuracy fixture");
  out.require(metrics({10, 0, 10, 0}).f1 == 1.0, "perfect f1");
  out.require(metrics({0, 5, 0, 5}).f1 == 0.0, "zero f1");
  out.require(!metrics({0, 0, 3, 0}).f1, "0/0 f1 must stay undefined");
}

void ingestion_criterion(Outcome& out) {
  std::ifstream in(HPCIDS_FIXTURE_DIR "/mini_stats.txt");
  const auto dump = parse_stats(in);
  const auto names = selected_event_names();
  const auto matrix = select_events(dump, names);
  const std::vector<std::vector<double>> expect = {
      {1482093, 254877, 512004, 1837, 341226, 1290, 170778, 547, 1469811, 2104, 1469811, 2104, 1391, 2104, 993, 3097},
      {2915408, 501233, 1007561, 2210, 671404, 1502, 336157, 708, 2890337, 2133, 2890337, 2133, 1629, 2133, 1081,
       3214}};
  out.require(matrix.rows.size() == 2 && names.size() == 16, "shape is not 2x16");
  for (std::size_t i = 0; i < std::min<std::size_t>(2, matrix.rows.size()); ++i)
    for (std::size_t j = 0; j < 16; ++j)
      out.require(matrix.rows[i][j] == expect[i][j], fmt::format("section {} {}", i + 1, names[j]));
}

void arbitration_criterion(Outcome& out) {
  XorShift64 rng(31337);
  std::size_t priority_violations = 0, idle_violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    std::vector<CanFrame> in;
    double t = 0.0;
    const auto count = 2 + rng.below(60);
    for (std::uint64_t i = 0; i < count; ++i) {
      if (rng.below(3)) t += rng.unit() * 3e-4;
      CanFrame f;
      f.timestamp = t;
      f.id = static_cast<std::uint16_t>(rng.below(3) ? 1 + rng.below(0x7FF) : 0);
      f.dlc = static_cast<std::uint8_t>(rng.below(9));
      f.label = f.id == 0 ? FrameLabel::DosInjected : FrameLabel::Benign;
      in.push_back(f);
    }
    const auto s = arbitrate(in, {});
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (i > 0 && s[i].tx_start > s[i - 1].tx_end + 1e-12 && s[i].tx_start > s[i].frame.timestamp + 1e-12)
        ++idle_violations;
      for (std::size_t j = i + 1; j < s.size(); ++j)
        if (s[j].frame.timestamp <= s[i].tx_start && s[j].frame.id < s[i].frame.id) ++priority_violations;
    }
  }
  out.require(priority_violations == 0, fmt::format("{} priority violations", priority_violations));
  out.require(idle_violations == 0, fmt::format("{} work-conservation violations", idle_violations));

  const auto benign = generate_benign({default_id_set(), 5.0, stage_seed(7, "traffic")});
  const auto base = delay_stats(arbitrate(benign, {}));
  const auto attacked = delay_stats(arbitrate(inject_dos(benign, {0.0, 5.0, 0.0005, DosPayload::Zeros, 0}), {}));
  std::size_t dominated = 0;
  for (const auto& [id, st] : base) {
    const bool ok = attacked.contains(id) && attacked.at(id).mean >= st.mean && attacked.at(id).max >= st.max;
    out.require(ok, fmt::format("delay of {:03X} not dominated", id));
    dominated += ok;
  }
  out.note(fmt::format("1000 random schedules clean; {} / {} identifiers delayed more under DoS", dominated,
                       base.size()));
}

// ---- end to end -----------------------------------------------------------------

constexpr std::uint64_t kSeed = 2024;
constexpr std::size_t kWindows = 12000;
constexpr double kDuration = 120.0;  // 10 ms windows

struct Dataset {
  CounterTable benign, attack;
};

CounterTable emulate(const std::vector<CanFrame>& ready, const DosProfile& dos) {
  const auto mixed = dos.stop > dos.start ? inject_dos(ready, dos) : ready;
  auto table = run_receiver(arbitrate(mixed, {}), {});
  table.samples.resize(std::min(table.samples.size(), kWindows));
  return table;
}

Dataset build_dataset() {
  const auto ready = generate_benign({default_id_set(), kDuration, stage_seed(kSeed, "traffic")});
  const DosProfile flood{0.0, kDuration, 0.0005, DosPayload::Zeros, stage_seed(kSeed, "dos")};
  auto benign = std::async(std::launch::async, [&] { return emulate(ready, {}); });
  auto attack = std::async(std::launch::async, [&] { return emulate(ready, flood); });
  return {benign.get(), attack.get()};
}

std::string render(const EvalReport& r) {
  std::ostringstream csv, json;
  write_report_csv(r, csv);
  write_report_json(r, json);
  return csv.str() + json.str();
}

void end_to_end_criterion(Outcome& out, const Dataset& data, const EvalReport& report, double pipeline_seconds,
                          double sweep_seconds, const std::string& rerun_bytes) {
  out.require(data.benign.samples.size() == kWindows && data.attack.samples.size() == kWindows,
              fmt::format("dataset has {} benign / {} attack windows", data.benign.samples.size(),
                          data.attack.samples.size()));
  out.require(report.rows.size() == 16, "expected 16 fractions");
  if (report.rows.empty()) return;

  for (const auto& row : report.rows)
    out.note(fmt::format("fraction {:.2f}: train {:5d}  tp {:5d} fp {:3d} tn {:3d} fn {:5d}  accuracy {:.4f}  f1 {:.4f}",
                         row.fraction, row.train_size, row.counts.tp, row.counts.fp, row.counts.tn, row.counts.fn,
                         row.metrics.accuracy.value_or(NAN), row.metrics.f1.value_or(NAN)));

  const auto& last = report.rows.back();
  const double recall = last.metrics.recall.value_or(0.0);
  const double accuracy = last.metrics.accuracy.value_or(0.0);
  out.require(recall >= 0.95, fmt::format("(a) recall at 0.95 is {:.4f}", recall));
  out.require(accuracy >= 0.90, fmt::format("(b) accuracy at 0.95 is {:.4f}", accuracy));

  std::size_t inversions = 0;
  double worst_drop = 0.0;
  for (std::size_t i = 1; i < report.rows.size(); ++i) {
    const double drop = report.rows[i - 1].metrics.accuracy.value_or(0) - report.rows[i].metrics.accuracy.value_or(0);
    if (drop > 0.0) {
      ++inversions;
      worst_drop = std::max(worst_drop, drop);
    }
  }
  out.require(inversions <= 1 && worst_drop <= 0.02,
              fmt::format("(b) accuracy trend has {} inversions, largest drop {:.4f}", inversions, worst_drop));
  out.require(rerun_bytes == render(report), "(c) rerun report differs");
  out.require(sweep_seconds < 300.0, fmt::format("sweep took {:.1f} s", sweep_seconds));
  out.note(fmt::format("(a) recall {:.4f}  (b) accuracy {:.4f}, {} inversions (max drop {:.4f})  (c) rerun {}",
                       recall, accuracy, inversions, worst_drop,
                       rerun_bytes == render(report) ? "byte-identical" : "DIFFERS"));
  out.note(fmt::format("dataset {:.1f} s, sweep {:.1f} s", pipeline_seconds, sweep_seconds));
}

}  // namespace

int main() {
  report("AES correctness", aes_criterion);

  // The end-to-end dataset also feeds the cache consistency check.
  const auto t_data = Clock::now();
  Dataset data;
  std::string data_error;
  try {
    data = build_dataset();
  } catch (const std::exception& e) {
    data_error = e.what();
  }
  const double data_seconds = seconds_since(t_data);

  report("Cache model", [&](Outcome& o) {
    if (!data_error.empty()) o.require(false, "dataset: " + data_error);
    cache_criterion(o, {&data.benign, &data.attack});
  });
  report("Standardizer", standardizer_criterion);
  report("Correlation pruning", pruning_criterion);
  report("OCSVM solver", ocsvm_criterion);
  report("Metrics", metrics_criterion);
  report("gem5 ingestion", ingestion_criterion);

  report("End-to-end qualitative reproduction", [&](Outcome& o) {
    if (!data_error.empty()) throw std::runtime_error(data_error);
    SweepConfig cfg;
    cfg.seed = stage_seed(kSeed, "sweep");
    const auto t_sweep = Clock::now();
    const auto report_1 = run_sweep(data.benign, data.attack, cfg);
    const double sweep_seconds = seconds_since(t_sweep);
    // Rerun the whole pipeline from the seed and compare the serialized reports.
    const auto again = build_dataset();
    const auto rerun = render(run_sweep(again.benign, again.attack, cfg));
    end_to_end_criterion(o, data, report_1, data_seconds, sweep_seconds, rerun);
  });
  report("Arbitration", arbitration_criterion);

  fmt::print("{} criteria failed\n", failures);
  return failures ? 1 : 0;
}
