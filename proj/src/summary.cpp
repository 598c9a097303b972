#include "hadal/summary.hpp"

#include "hadal/errors.hpp"

#include <json.hpp>

#include <fstream>

namespace hadal {

std::string Outcome::label() const {
  switch (kind) {
    case OutcomeKind::Done: return "done";
    case OutcomeKind::Abort: return "abort(" + abort_reason + ")";
    case OutcomeKind::Timeout: return "timeout";
  }
  return "unknown";
}

void RunSummary::set_wall_time(double seconds) {
  wall_time = seconds;
  if (seconds > 0.0 && sim_time > 0.0) {
    real_time_factor = sim_time / seconds;
  } else {
    real_time_factor.reset();
  }
}

void SummaryBuilder::add(const LogRecord& record) {
  if (any_ && record.time < last_time_) {
    throw IncompleteLog("record of kind " + std::string(to_string(record.kind)) + " at t=" +
                        format_double(record.time) + " goes back in time");
  }
  any_ = true;
  last_time_ = record.time;
  summary_.sim_time = record.time;

  switch (record.kind) {
    case RecordKind::Truth:
      if (pending_truth_) {
        throw IncompleteLog("truth record at t=" + format_double(pending_truth_->time) + " has no ins partner");
      }
      pending_truth_ = record;
      break;

    case RecordKind::Ins: {
      if (!pending_truth_ || pending_truth_->time != record.time) {
        throw IncompleteLog("ins record at t=" + format_double(record.time) + " has no truth partner");
      }
      ErrorSample sample;
      sample.time = record.time;
      sample.error = Vec3(record.number("north") - pending_truth_->number("north"),
                          record.number("east") - pending_truth_->number("east"),
                          record.number("down") - pending_truth_->number("down"));
      summary_.max_ins_error = std::max(summary_.max_ins_error, sample.norm());
      summary_.final_ins_error = sample.norm();
      summary_.terminal_axis_error = sample.error.cwiseAbs();
      summary_.error_series.push_back(sample);
      pending_truth_.reset();
      break;
    }

    case RecordKind::Phase: {
      PhaseTimelineEntry entry{record.time, record.text("from"), record.text("to"), record.text("reason")};
      if (entry.to == "done") {
        summary_.outcome = {OutcomeKind::Done, ""};
      } else if (entry.to == "abort") {
        summary_.outcome = {OutcomeKind::Abort, entry.reason};
      }
      summary_.phase_timeline.push_back(std::move(entry));
      break;
    }

    case RecordKind::Waypoint:
      ++summary_.waypoints_captured;
      summary_.waypoints_total = static_cast<int>(record.number("total"));
      break;

    case RecordKind::Grasp: {
      const std::string& event = record.text("event");
      const Vec3 object(record.number("object_north"), record.number("object_east"), record.number("object_down"));
      if (event == "attached" || event == "rejected") ++summary_.grasp_attempts;
      if (event == "attached") summary_.attach_gap = record.number("gap");
      summary_.object_final_position = object;
      break;
    }

    default:
      break;
  }
}

RunSummary SummaryBuilder::finish() const {
  if (pending_truth_) {
    throw IncompleteLog("truth record at t=" + format_double(pending_truth_->time) + " has no ins partner");
  }
  return summary_;
}

RunSummary summarize(const std::vector<LogRecord>& records) {
  SummaryBuilder builder;
  for (const LogRecord& record : records) builder.add(record);
  return builder.finish();
}

RunSummary summarize_directory(const std::filesystem::path& directory) {
  RunSummary summary = summarize(read_record_stream(directory));
  const auto run_file = directory / kRunSummaryFile;
  std::ifstream in(run_file);
  if (in) {
    try {
      const auto j = nlohmann::json::parse(in);
      if (j.contains("wall_time_s") && j["wall_time_s"].is_number()) {
        summary.set_wall_time(j["wall_time_s"].get<double>());
      }
    } catch (const nlohmann::json::exception&) {
      // a damaged summary only costs the wall time
    }
  }
  return summary;
}

namespace {

std::ofstream open_output(const std::filesystem::path& file) {
  if (file.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(file.parent_path(), ec);
    if (ec) throw IoError("cannot create '" + file.parent_path().string() + "': " + ec.message());
  }
  std::ofstream out(file, std::ios::trunc);
  if (!out) throw IoError("cannot open '" + file.string() + "' for writing");
  return out;
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

void write_error_series(const RunSummary& summary, const std::filesystem::path& file) {
  std::ofstream out = open_output(file);
  out << "time,err_north,err_east,err_down,err_norm\n";
  for (const ErrorSample& s : summary.error_series) {
    out << format_double(s.time) << ',' << format_double(s.error.x()) << ',' << format_double(s.error.y()) << ','
        << format_double(s.error.z()) << ',' << format_double(s.norm()) << '\n';
  }
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

void write_phase_timeline(const RunSummary& summary, const std::filesystem::path& file) {
  std::ofstream out = open_output(file);
  out << "time,from,to,reason\n";
  for (const PhaseTimelineEntry& e : summary.phase_timeline) {
    out << format_double(e.time) << ',' << e.from << ',' << e.to << ',' << e.reason << '\n';
  }
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

std::string summary_json(const RunSummary& s) {
  nlohmann::ordered_json j;
  j["outcome"] = s.outcome.label();
  j["final_ins_error_m"] = s.final_ins_error;
  j["max_ins_error_m"] = s.max_ins_error;
  j["terminal_error_m"] = {{"north", s.terminal_axis_error.x()},
                           {"east", s.terminal_axis_error.y()},
                           {"down", s.terminal_axis_error.z()}};
  j["waypoints_captured"] = s.waypoints_captured;
  j["waypoints_total"] = s.waypoints_total;
  j["grasp_attempts"] = s.grasp_attempts;
  j["attach_gap_m"] = optional_number(s.attach_gap);
  if (s.object_final_position) {
    const Vec3& p = *s.object_final_position;
    j["object_final_position"] = {p.x(), p.y(), p.z()};
  } else {
    j["object_final_position"] = nullptr;
  }
  j["phase_transitions"] = s.phase_timeline.size();
  j["sim_time_s"] = s.sim_time;
  j["wall_time_s"] = optional_number(s.wall_time);
  j["real_time_factor"] = optional_number(s.real_time_factor);
  return j.dump(2);
}

void write_summary_json(const RunSummary& summary, const std::filesystem::path& file) {
  std::ofstream out = open_output(file);
  out << summary_json(summary) << '\n';
  if (!out) throw IoError("write failed for '" + file.string() + "'");
}

void write_summary_products(const RunSummary& summary, const std::filesystem::path& directory) {
  write_error_series(summary, directory / kErrorSeriesFile);
  write_phase_timeline(summary, directory / kPhaseTimelineFile);
  write_summary_json(summary, directory / kRunSummaryFile);
}

}  // namespace hadal
