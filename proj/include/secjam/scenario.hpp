#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

namespace secjam {

/// Horizontal position on the ground plane, meters.
using Point2 = Eigen::Vector2d;

/// Relative tolerance used by every invariant check.
inline constexpr double kInvariantTol = 1e-6;

/// One problem instance: geometry, platform limits, power budgets and the slot grid.
///
/// Gains are stored pre-divided by the receiver noise power, so the noise term in
/// every SINR is exactly 1. Speeds are kept in m/s and the per-slot displacement
/// limit is derived, so a saved scenario reloads bit-for-bit.
struct Scenario {
  Point2 gn_location{0.0, 0.0};
  Point2 est_eve_location{200.0, 0.0};
  double eve_uncertainty = 10.0;  // radius of the eavesdropper disk, m

  double altitude_tx = 100.0;
  double altitude_jam = 110.0;
  double speed_tx = 10.0;  // m/s
  double speed_jam = 10.0;

  double slot_duration = 1.0;  // s
  int num_slots = 200;

  double p_ave = 1.0;   // W
  double p_peak = 4.0;  // W
  double gamma0 = 1e8;  // reference gain over noise power, m^2

  Point2 start_tx{100.0, 500.0};
  Point2 end_tx{100.0, -500.0};
  Point2 start_jam{100.0, 500.0};
  Point2 end_jam{100.0, -500.0};

  double max_step_tx() const { return speed_tx * slot_duration; }
  double max_step_jam() const { return speed_jam * slot_duration; }
  double horizon() const { return num_slots * slot_duration; }

  bool operator==(const Scenario&) const = default;
};

/// Per-UAV waypoints q_i[0..N+1]; index 0 and N+1 are the fixed endpoints.
struct Trajectory {
  std::vector<Point2> tx;
  std::vector<Point2> jam;

  int num_slots() const { return static_cast<int>(tx.size()) - 2; }
};

/// Per-UAV per-slot transmit powers p_i[1..N], stored zero-based.
struct PowerProfile {
  std::vector<double> tx;
  std::vector<double> jam;

  int num_slots() const { return static_cast<int>(tx.size()); }
};

struct Violation {
  std::string field;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;

  bool ok() const { return violations.empty(); }
  std::string to_string() const;
};

ValidationReport validate(const Scenario& s);

/// Checks endpoint pinning and the per-slot displacement limit.
ValidationReport check_trajectory(const Trajectory& traj, const Scenario& s);

/// Checks 0 <= p <= P_peak and the average-power budget for both UAVs.
ValidationReport check_power(const PowerProfile& power, const Scenario& s);

/// The reference instance: GN at the origin, eavesdropper estimate 200 m east,
/// both UAVs flying (100, 500) -> (100, -500), 30 dBm average power, 4x peak,
/// 80 dB reference SNR gain and 1 s slots.
Scenario default_paper_scenario(int horizon_seconds);

double dbm_to_watts(double dbm);
double watts_to_dbm(double watts);
double db_to_linear(double db);

}  // namespace secjam
