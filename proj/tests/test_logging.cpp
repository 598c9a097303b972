#include "hadal/errors.hpp"
#include "hadal/logging.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

#include <fstream>

using namespace hadal;

namespace {

LogRecord numeric(RecordKind kind, double time, test::Rng& rng) {
  LogRecord r{kind, time, {}};
  for (std::size_t i = 1; i < record_columns(kind).size(); ++i) r.values.emplace_back(rng.uniform(-1e4, 1e4) / 3.0);
  return r;
}

std::string first_line(const std::filesystem::path& file) {
  std::ifstream in(file);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST(Logging, KindNamesRoundTrip) {
  for (RecordKind k : kAllRecordKinds) EXPECT_EQ(parse_record_kind(to_string(k)), k);
  EXPECT_FALSE(parse_record_kind("bogus").has_value());
}

TEST(Logging, TruthHeader) {
  const auto dir = test::scratch_dir("log_header");
  FileLogWriter writer(dir);
  writer.close();
  EXPECT_EQ(first_line(dir / "truth.csv"), "time,north,east,down,yaw,vx,vy,vz,yaw_rate");
  EXPECT_EQ(first_line(dir / "ins.csv"), "time,north,east,down,yaw,vn,ve,vd");
  for (RecordKind k : kAllRecordKinds) EXPECT_TRUE(std::filesystem::exists(dir / (std::string(to_string(k)) + ".csv")));
}

TEST(Logging, FormatDoubleIsShortestRoundTrip) {
  EXPECT_EQ(format_double(0.1), "0.1");
  EXPECT_EQ(format_double(6000.0), "6000");
  test::Rng rng(4);
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-1e6, 1e6) / 7.0;
    EXPECT_EQ(std::stod(format_double(v)), v);
  }
}

TEST(Logging, CsvAndStreamRoundTripExactly) {
  const auto dir = test::scratch_dir("log_roundtrip");
  test::Rng rng(9);
  std::vector<LogRecord> records;
  for (int i = 0; i < 50; ++i) {
    const double t = 0.1 * i;
    records.push_back(numeric(RecordKind::Truth, t, rng));
    records.push_back(numeric(RecordKind::Ins, t, rng));
    records.push_back(numeric(RecordKind::Thrusters, t, rng));
  }
  records.push_back({RecordKind::Phase, 5.0, {std::string("descend"), std::string("survey"), std::string("none")}});
  records.push_back({RecordKind::Grasp, 5.0, {std::string("attached"), 0.02, 1.0, 2.0, 3.0}});
  write_logs(records, dir);

  const std::vector<LogRecord> back = read_record_stream(dir);
  ASSERT_EQ(back.size(), records.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    EXPECT_EQ(back[i].kind, records[i].kind);
    EXPECT_EQ(back[i].time, records[i].time);
    EXPECT_EQ(back[i].values, records[i].values);
  }

  const std::vector<LogRecord> truth = read_csv(dir / "truth.csv", RecordKind::Truth);
  ASSERT_EQ(truth.size(), 50u);
  std::size_t j = 0;
  for (const LogRecord& r : records) {
    if (r.kind != RecordKind::Truth) continue;
    EXPECT_EQ(truth[j].time, r.time);
    EXPECT_EQ(truth[j].values, r.values);
    ++j;
  }
  const std::vector<LogRecord> phase = read_csv(dir / "phase.csv", RecordKind::Phase);
  ASSERT_EQ(phase.size(), 1u);
  EXPECT_EQ(phase[0].text("to"), "survey");
  EXPECT_EQ(read_csv(dir / "grasp.csv", RecordKind::Grasp)[0].number("gap"), 0.02);
}

TEST(Logging, ColumnAccess) {
  const LogRecord r{RecordKind::Truth, 2.5, {1.0, 2.0, 3.0, 0.1, 0.0, 0.0, 0.0, 0.0}};
  EXPECT_EQ(r.number("time"), 2.5);
  EXPECT_EQ(r.number("down"), 3.0);
  EXPECT_EQ(r.number(3), 0.1);
}

TEST(Logging, WrongHeaderIsRejected) {
  const auto dir = test::scratch_dir("log_bad_header");
  {
    std::ofstream out(dir / "truth.csv");
    out << "time,x,y\n0,1,2\n";
  }
  EXPECT_THROW(read_csv(dir / "truth.csv", RecordKind::Truth), IncompleteLog);
}

TEST(Logging, TruncatedRowIsRejected) {
  const auto dir = test::scratch_dir("log_truncated");
  {
    std::ofstream out(dir / "ins.csv");
    out << "time,north,east,down,yaw,vn,ve,vd\n0,1,2,3\n";
  }
  EXPECT_THROW(read_csv(dir / "ins.csv", RecordKind::Ins), IncompleteLog);
}

TEST(Logging, UnwritableDirectoryIsIoError) {
  const auto dir = test::scratch_dir("log_blocked");
  {
    std::ofstream out(dir / "plainfile");
    out << "x";
  }
  EXPECT_THROW(FileLogWriter(dir / "plainfile" / "sub"), IoError);
}

TEST(Logging, MissingStreamIsError) {
  EXPECT_THROW(read_record_stream(test::scratch_dir("log_empty_dir") / "absent"), Error);
}
