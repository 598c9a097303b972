#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace hadal {

enum class RecordKind { Truth, Ins, Wrench, Thrusters, Joints, Phase, Detection, Grasp, Waypoint };

inline constexpr RecordKind kAllRecordKinds[] = {
    RecordKind::Truth, RecordKind::Ins,    RecordKind::Wrench, RecordKind::Thrusters, RecordKind::Joints,
    RecordKind::Phase, RecordKind::Detection, RecordKind::Grasp, RecordKind::Waypoint};

std::string_view to_string(RecordKind kind);
std::optional<RecordKind> parse_record_kind(std::string_view name);

/// Column names for a record kind, "time" first. This order is the CSV header.
const std::vector<std::string>& record_columns(RecordKind kind);

using FieldValue = std::variant<double, std::string>;

/// One time-stamped row; values follow record_columns(kind) without the time column.
struct LogRecord {
  RecordKind kind = RecordKind::Truth;
  double time = 0.0;
  std::vector<FieldValue> values;

  double number(std::size_t index) const;
  const std::string& text(std::size_t index) const;
  /// Value by column name ("time" included).
  double number(std::string_view column) const;
  const std::string& text(std::string_view column) const;
};

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

class LogSink {
 public:
  virtual ~LogSink() = default;
  virtual void write(const LogRecord& record) = 0;
};

class MemoryLog : public LogSink {
 public:
  void write(const LogRecord& record) override { records_.push_back(record); }
  const std::vector<LogRecord>& records() const { return records_; }
  std::vector<LogRecord> of_kind(RecordKind kind) const;

 private:
  std::vector<LogRecord> records_;
};

inline constexpr std::string_view kRecordStreamFile = "records.jsonl";

/// Writes one CSV per record kind (<kind>.csv, header row always present) and
/// the interleaved line-delimited JSON stream records.jsonl. The directory is
/// created when missing. Throws IoError when a file cannot be opened.
class FileLogWriter : public LogSink {
 public:
  explicit FileLogWriter(const std::filesystem::path& directory);
  ~FileLogWriter() override;
  FileLogWriter(const FileLogWriter&) = delete;
  FileLogWriter& operator=(const FileLogWriter&) = delete;

  void write(const LogRecord& record) override;
  void close();

 private:
  std::filesystem::path directory_;
  std::map<RecordKind, std::ofstream> csv_;
  std::ofstream stream_;
};

/// Writes a finished record list through a FileLogWriter.
void write_logs(const std::vector<LogRecord>& records, const std::filesystem::path& directory);

/// Reads records.jsonl back, in file order.
std::vector<LogRecord> read_record_stream(const std::filesystem::path& directory);

/// Reads one CSV back; checks the header against record_columns(kind).
std::vector<LogRecord> read_csv(const std::filesystem::path& file, RecordKind kind);

}  // namespace hadal
