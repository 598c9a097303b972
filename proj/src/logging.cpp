#include "hadal/logging.hpp"

#include "hadal/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <sstream>

namespace hadal {

namespace {

using Columns = std::vector<std::string>;

const std::map<RecordKind, Columns>& column_table() {
  static const std::map<RecordKind, Columns> table{
      {RecordKind::Truth, {"time", "north", "east", "down", "yaw", "vx", "vy", "vz", "yaw_rate"}},
      {RecordKind::Ins, {"time", "north", "east", "down", "yaw", "vn", "ve", "vd"}},
      {RecordKind::Wrench,
       {"time", "fx_world", "fy_world", "fz_world", "tau_world", "fx_body", "fy_body", "fz_body", "tau_body"}},
      {RecordKind::Thrusters, {"time", "t1", "t2", "t3", "t4", "t5", "t6", "t7", "t8"}},
      {RecordKind::Joints, {"time", "q1", "q2", "q3", "qd1", "qd2", "qd3", "qdd1", "qdd2", "qdd3"}},
      {RecordKind::Phase, {"time", "from", "to", "reason"}},
      {RecordKind::Detection, {"time", "offset_north", "offset_east", "offset_down"}},
      {RecordKind::Grasp, {"time", "event", "gap", "object_north", "object_east", "object_down"}},
      {RecordKind::Waypoint, {"time", "index", "total", "north", "east", "down", "yaw"}},
  };
  return table;
}

bool is_text_column(RecordKind kind, std::string_view column) {
  return (kind == RecordKind::Phase && column != "time") || (kind == RecordKind::Grasp && column == "event");
}

std::size_t column_index(RecordKind kind, std::string_view column) {
  const Columns& cols = record_columns(kind);
  const auto it = std::find(cols.begin(), cols.end(), column);
  if (it == cols.end() || it == cols.begin()) {
    throw std::out_of_range("no column '" + std::string(column) + "' in " + std::string(to_string(kind)));
  }
  return static_cast<std::size_t>(it - cols.begin()) - 1;
}

double parse_double(const std::string& text, const std::string& where) {
  // strtod accepts the shortest round-trip form and inf/nan spellings
  char* end = nullptr;
  const double value = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size()) throw IncompleteLog("bad number '" + text + "' in " + where);
  return value;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::stringstream in(line);
  std::string cell;
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string_view to_string(RecordKind kind) {
  switch (kind) {
    case RecordKind::Truth: return "truth";
    case RecordKind::Ins: return "ins";
    case RecordKind::Wrench: return "wrench";
    case RecordKind::Thrusters: return "thrusters";
    case RecordKind::Joints: return "joints";
    case RecordKind::Phase: return "phase";
    case RecordKind::Detection: return "detection";
    case RecordKind::Grasp: return "grasp";
    case RecordKind::Waypoint: return "waypoint";
  }
  return "unknown";
}

std::optional<RecordKind> parse_record_kind(std::string_view name) {
  for (RecordKind kind : kAllRecordKinds) {
    if (to_string(kind) == name) return kind;
  }
  return std::nullopt;
}

const std::vector<std::string>& record_columns(RecordKind kind) { return column_table().at(kind); }

double LogRecord::number(std::size_t index) const { return std::get<double>(values.at(index)); }
const std::string& LogRecord::text(std::size_t index) const { return std::get<std::string>(values.at(index)); }

double LogRecord::number(std::string_view column) const {
  if (column == "time") return time;
  return number(column_index(kind, column));
}

const std::string& LogRecord::text(std::string_view column) const { return text(column_index(kind, column)); }

std::string format_double(double value) {
  std::array<char, 64> buffer{};
  const auto result = std::to_chars(buffer.data(), buffer.data() + buffer.size(), value);
  return std::string(buffer.data(), result.ptr);
}

std::vector<LogRecord> MemoryLog::of_kind(RecordKind kind) const {
  std::vector<LogRecord> out;
  std::copy_if(records_.begin(), records_.end(), std::back_inserter(out),
               [kind](const LogRecord& r) { return r.kind == kind; });
  return out;
}

FileLogWriter::FileLogWriter(const std::filesystem::path& directory) : directory_(directory) {
  std::error_code ec;
  std::filesystem::create_directories(directory_, ec);
  if (ec) throw IoError("cannot create log directory '" + directory_.string() + "': " + ec.message());
  for (RecordKind kind : kAllRecordKinds) {
    const auto path = directory_ / (std::string(to_string(kind)) + ".csv");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
    const Columns& cols = record_columns(kind);
    for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    csv_.emplace(kind, std::move(out));
  }
  const auto stream_path = directory_ / kRecordStreamFile;
  stream_.open(stream_path, std::ios::trunc);
  if (!stream_) throw IoError("cannot open '" + stream_path.string() + "' for writing");
}

FileLogWriter::~FileLogWriter() {
  try {
    close();
  } catch (...) {
  }
}

void FileLogWriter::write(const LogRecord& record) {
  const Columns& cols = record_columns(record.kind);
  if (record.values.size() + 1 != cols.size()) {
    throw std::invalid_argument("record of kind " + std::string(to_string(record.kind)) + " has wrong field count");
  }
  std::ofstream& csv = csv_.at(record.kind);
  csv << format_double(record.time);
  nlohmann::ordered_json line;
  line["time"] = record.time;
  line["kind"] = to_string(record.kind);
  for (std::size_t i = 0; i < record.values.size(); ++i) {
    const FieldValue& v = record.values[i];
    if (const double* d = std::get_if<double>(&v)) {
      csv << ',' << format_double(*d);
      line[cols[i + 1]] = *d;
    } else {
      csv << ',' << std::get<std::string>(v);
      line[cols[i + 1]] = std::get<std::string>(v);
    }
  }
  csv << '\n';
  stream_ << line.dump() << '\n';
  if (!csv || !stream_) throw IoError("write failed in '" + directory_.string() + "'");
}

void FileLogWriter::close() {
  for (auto& [kind, out] : csv_) {
    if (out.is_open()) out.close();
  }
  if (stream_.is_open()) stream_.close();
}

void write_logs(const std::vector<LogRecord>& records, const std::filesystem::path& directory) {
  FileLogWriter writer(directory);
  for (const LogRecord& record : records) writer.write(record);
  writer.close();
}

std::vector<LogRecord> read_record_stream(const std::filesystem::path& directory) {
  const auto path = directory / kRecordStreamFile;
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<LogRecord> records;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty()) continue;
    nlohmann::ordered_json j;
    try {
      j = nlohmann::ordered_json::parse(line);
    } catch (const nlohmann::json::exception& e) {
      throw IncompleteLog("records.jsonl line " + std::to_string(line_number) + ": " + e.what());
    }
    const auto kind = parse_record_kind(j.value("kind", std::string()));
    if (!kind) throw IncompleteLog("records.jsonl line " + std::to_string(line_number) + ": unknown kind");
    LogRecord record;
    record.kind = *kind;
    record.time = j.at("time").get<double>();
    const Columns& cols = record_columns(*kind);
    for (std::size_t i = 1; i < cols.size(); ++i) {
      if (!j.contains(cols[i])) {
        throw IncompleteLog("records.jsonl line " + std::to_string(line_number) + ": missing " + cols[i]);
      }
      const auto& field = j.at(cols[i]);
      if (is_text_column(*kind, cols[i])) {
        record.values.emplace_back(field.get<std::string>());
      } else {
        record.values.emplace_back(field.is_null() ? std::nan("") : field.get<double>());
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

std::vector<LogRecord> read_csv(const std::filesystem::path& file, RecordKind kind) {
  std::ifstream in(file);
  if (!in) throw IoError("cannot open '" + file.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw IncompleteLog(file.string() + " has no header");
  const Columns& cols = record_columns(kind);
  if (split_csv_line(line) != cols) throw IncompleteLog(file.string() + " header does not match " + std::string(to_string(kind)));
  std::vector<LogRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv_line(line);
    if (cells.size() != cols.size()) throw IncompleteLog(file.string() + ": wrong cell count");
    LogRecord record;
    record.kind = kind;
    record.time = parse_double(cells[0], file.string());
    for (std::size_t i = 1; i < cells.size(); ++i) {
      if (is_text_column(kind, cols[i])) {
        record.values.emplace_back(cells[i]);
      } else {
        record.values.emplace_back(parse_double(cells[i], file.string()));
      }
    }
    records.push_back(std::move(record));
  }
  return records;
}

}  // namespace hadal
