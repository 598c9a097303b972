#pragma once

#include "hadal/logging.hpp"
#include "hadal/mission.hpp"
#include "hadal/types.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hadal {

enum class OutcomeKind { Done, Abort, Timeout };

struct Outcome {
  OutcomeKind kind = OutcomeKind::Timeout;
  std::string abort_reason;  // set for Abort

  std::string label() const;  // "done", "abort(grasp_failed)", "timeout"
};

struct ErrorSample {
  double time = 0.0;
  Vec3 error = Vec3::Zero();  // ins - truth, NED
  double norm() const { return error.norm(); }
};

struct PhaseTimelineEntry {
  double time = 0.0;
  std::string from;
  std::string to;
  std::string reason;
};

struct RunSummary {
  Outcome outcome;
  double final_ins_error = 0.0;
  double max_ins_error = 0.0;
  Vec3 terminal_axis_error = Vec3::Zero();
  int waypoints_captured = 0;
  int waypoints_total = 0;
  int grasp_attempts = 0;
  std::optional<double> attach_gap;         // gap of the successful attach
  std::optional<Vec3> object_final_position;
  double sim_time = 0.0;
  std::optional<double> wall_time;          // not recoverable from logs alone
  std::optional<double> real_time_factor;

  std::vector<ErrorSample> error_series;
  std::vector<PhaseTimelineEntry> phase_timeline;

  void set_wall_time(double seconds);
};

/// Folds a time-ordered record stream into a RunSummary. Throws IncompleteLog
/// when records go back in time or a truth record lacks its ins partner.
class SummaryBuilder {
 public:
  void add(const LogRecord& record);
  /// Outcome for a run that ended without a terminal phase record.
  RunSummary finish() const;

 private:
  RunSummary summary_;
  std::optional<LogRecord> pending_truth_;
  double last_time_ = -1.0;
  bool any_ = false;
  std::vector<double> waypoint_indices_;
};

RunSummary summarize(const std::vector<LogRecord>& records);

/// Reads records.jsonl (and the wall time from run_summary.json when present).
RunSummary summarize_directory(const std::filesystem::path& directory);

inline constexpr std::string_view kErrorSeriesFile = "error_series.csv";
inline constexpr std::string_view kPhaseTimelineFile = "phase_timeline.csv";
inline constexpr std::string_view kRunSummaryFile = "run_summary.json";

/// time,err_north,err_east,err_down,err_norm
void write_error_series(const RunSummary& summary, const std::filesystem::path& file);
/// time,from,to,reason
void write_phase_timeline(const RunSummary& summary, const std::filesystem::path& file);

/// Structured block with every scalar field (series excluded).
std::string summary_json(const RunSummary& summary);
void write_summary_json(const RunSummary& summary, const std::filesystem::path& file);

/// Writes the error series, the phase timeline and the summary block into a directory.
void write_summary_products(const RunSummary& summary, const std::filesystem::path& directory);

}  // namespace hadal
