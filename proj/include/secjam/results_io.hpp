#pragma once

#include "secjam/planner.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace secjam {

/// One row of summary.csv.
struct SummaryRow {
  std::string scheme;
  double horizon_s = 0.0;
  double eps_m = 0.0;
  double avg_rbar = 0.0;
  double avg_rtilde = 0.0;
  int outer_rounds = 0;
  double wall_ms = 0.0;
};

SummaryRow summary_row(const Plan& plan, const Scenario& s, double wall_ms);

/// slot,q1x,q1y,q2x,q2y,p1_w,p2_w,r0,re_ub,rbar,rtilde for slots 0..N+1; the
/// power and rate columns are empty at the two fixed endpoints.
std::string format_trajectory_csv(const Plan& plan);
std::string format_summary_csv(const std::vector<SummaryRow>& rows);
std::string format_convergence_csv(const Plan& plan);

/// One point of a sweep; failed points keep their status and message.
struct SweepRow {
  std::string param;
  double value = 0.0;
  std::string status;  // ok | config_error | solver_failure
  SummaryRow summary;
  std::string dir;  // per-point artifact directory, relative to the sweep root
  std::string message;
};

std::string format_sweep_csv(const std::vector<SweepRow>& rows);

/// Writes to a temporary sibling and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

/// trajectory.csv, summary.csv and convergence.csv into `dir` (created if needed).
void write_plan(const std::filesystem::path& dir, const Plan& plan, const Scenario& s, double wall_ms);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  /// Index of a header column; throws std::out_of_range if absent.
  std::size_t column(const std::string& name) const;
};

/// Minimal reader for the files above (double-quoted fields may hold commas).
CsvTable parse_csv(const std::string& text);
CsvTable read_csv(const std::filesystem::path& path);

/// Trajectory and powers back from trajectory.csv.
struct LoadedPlan {
  Trajectory traj;
  PowerProfile power;
};

LoadedPlan load_trajectory_csv(const std::filesystem::path& path);

}  // namespace secjam
