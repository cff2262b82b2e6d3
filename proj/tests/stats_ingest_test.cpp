#include <fstream>
#include <sstream>

#include <gtest/gtest.h>

#include "hpcids/stats_ingest.hpp"

using namespace hpcids;

namespace {

StatsDump load_fixture() {
  std::ifstream in(HPCIDS_FIXTURE_DIR "/mini_stats.txt");
  EXPECT_TRUE(in.good());
  return parse_stats(in);
}

StatsDump parse(const std::string& text) {
  std::istringstream in(text);
  return parse_stats(in);
}

const std::vector<double> kSection1 = {1482093, 254877, 512004, 1837, 341226, 1290,    170778, 547,
                                       1469811, 2104,   1469811, 2104, 1391,  2104,    993,    3097};
const std::vector<double> kSection2 = {2915408, 501233, 1007561, 2210, 671404, 1502,   336157, 708,
                                       2890337, 2133,   2890337, 2133, 1629,   2133,   1081,   3214};

}  // namespace

TEST(ParseStats, FixtureSelectsTwoBySixteen) {
  const auto dump = load_fixture();
  ASSERT_EQ(dump.sections.size(), 2u);
  const auto names = selected_event_names();
  ASSERT_EQ(names.size(), 16u);
  const auto m = select_events(dump, names);
  ASSERT_EQ(m.rows.size(), 2u);
  for (std::size_t j = 0; j < 16; ++j) {
    ASSERT_TRUE(m.rows[0][j]) << names[j];
    EXPECT_EQ(*m.rows[0][j], kSection1[j]) << names[j];
    EXPECT_EQ(*m.rows[1][j], kSection2[j]) << names[j];
  }
}

TEST(ParseStats, FlattenedNamesAreVerbatim) {
  const auto dump = load_fixture();
  EXPECT_EQ(dump.sections[0].find("system.l2.demandMisses::total"), 3097.0);
  EXPECT_EQ(dump.sections[0].find("system.cpu.op_class_0::IntAlu"), 1014123.0);
  EXPECT_EQ(dump.sections[0].find("system.cpu.ipc"), 0.741046);
  // Near misses of a selected name do not match.
  EXPECT_FALSE(dump.sections[0].find("system.l2.demandMisses"));
  EXPECT_FALSE(dump.sections[0].find("system.l2.demandMisses::cpu"));
}

TEST(ParseStats, NanRecordsAreSkippedWithDiagnostic) {
  const auto dump = load_fixture();
  EXPECT_FALSE(dump.sections[0].find("system.cpu.dcache.demandAvgMissLatency::cpu.data"));
  ASSERT_EQ(dump.diagnostics.size(), 2u);
  EXPECT_NE(dump.diagnostics[0].message.find("demandAvgMissLatency"), std::string::npos);
}

TEST(ParseStats, MarkerErrors) {
  const std::string begin = "---------- Begin Simulation Statistics ----------\n";
  const std::string end = "---------- End Simulation Statistics   ----------\n";
  for (const auto& text : {begin + "a 1\n", begin + "a 1\n" + begin + "b 2\n" + end, end}) {
    try {
      parse(text);
      FAIL() << text;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::UnterminatedSection);
    }
  }
  EXPECT_TRUE(parse("").sections.empty());
}

TEST(ParseStats, WriteParseRoundTrip) {
  const auto dump = load_fixture();
  std::stringstream io;
  write_stats(dump, io);
  const auto back = parse_stats(io);
  ASSERT_EQ(back.sections.size(), dump.sections.size());
  for (std::size_t i = 0; i < dump.sections.size(); ++i)
    EXPECT_EQ(back.sections[i].records(), dump.sections[i].records());
}

TEST(SamplesFromStats, LabelsAndDroppedSections) {
  auto dump = load_fixture();
  // A third section lacking every selected event.
  dump.sections.emplace_back();
  dump.sections.back().add("simSeconds", 0.01);
  const auto names = selected_event_names();
  const auto m = select_events(dump, names);
  const std::vector<SampleLabel> labels = {SampleLabel::Benign, SampleLabel::Attack, SampleLabel::Benign};
  const auto result = samples_from_stats(m, labels);
  ASSERT_EQ(result.table.samples.size(), 2u);
  EXPECT_EQ(result.diagnostics.size(), 1u);
  EXPECT_EQ(result.diagnostics[0].line, 3u);
  EXPECT_EQ(result.table.samples[1].label, SampleLabel::Attack);
  EXPECT_EQ(result.table.samples[1].values, kSection2);
  EXPECT_EQ(result.table.names, names);

  const std::vector<SampleLabel> short_labels = {SampleLabel::Benign};
  try {
    samples_from_stats(m, short_labels);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::LabelCountMismatch);
  }
}

TEST(SamplesFromStats, LabelFile) {
  std::ifstream in(HPCIDS_FIXTURE_DIR "/mini_labels.txt");
  const auto labels = read_labels(in);
  ASSERT_EQ(labels.size(), 2u);
  EXPECT_EQ(labels[0], SampleLabel::Benign);
  EXPECT_EQ(labels[1], SampleLabel::Attack);
  std::istringstream bad("benign\nmaybe\n");
  EXPECT_THROW(read_labels(bad), Error);
}

TEST(StatsSection, FirstValueWins) {
  StatsSection s;
  EXPECT_TRUE(s.add("x", 1));
  EXPECT_FALSE(s.add("x", 2));
  EXPECT_EQ(s.find("x"), 1.0);
  EXPECT_EQ(s.size(), 1u);
}
