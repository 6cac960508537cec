#pragma once

#include "secjam/parallel.hpp"
#include "secjam/scenario.hpp"

#include <vector>

namespace secjam {

/// Per-slot rates in bps/Hz.
struct SlotRates {
  double r0 = 0.0;      // legitimate link rate
  double re_ub = 0.0;   // worst-case eavesdropper rate over the uncertainty disk
  double rbar = 0.0;    // r0 - re_ub
  double rtilde = 0.0;  // max(rbar, 0)
};

/// The four noise-normalized gains a slot's rates depend on.
struct SlotGains {
  double g1 = 0.0;  // UAV 1 -> GN
  double g2 = 0.0;  // UAV 2 -> GN
  double h1 = 0.0;  // UAV 1 -> eavesdropper, worst case (largest)
  double h2 = 0.0;  // UAV 2 -> eavesdropper, worst case (smallest)
};

/// Free-space LoS gain gamma0 / (|q - ground|^2 + H^2).
double los_gain(const Point2& q, double altitude, const Point2& ground, double gamma0);

double gain_to_gn(const Point2& q, double altitude, const Scenario& s);

/// Largest transmitter-to-eavesdropper gain over the uncertainty disk. The
/// horizontal distance is clamped at zero when q1 is inside the disk.
double worst_gain_to_eve_tx(const Point2& q1, const Scenario& s);

/// Smallest jammer-to-eavesdropper gain over the uncertainty disk.
double best_gain_to_eve_jam(const Point2& q2, const Scenario& s);

/// Eavesdropper location in the disk that maximizes the transmitter gain.
/// Inside the disk this is q1 itself; q1 == estimate uses direction (1, 0).
Point2 attaining_eve_point_tx(const Point2& q1, const Scenario& s);

/// Eavesdropper location in the disk that minimizes the jammer gain.
Point2 attaining_eve_point_jam(const Point2& q2, const Scenario& s);

SlotGains slot_gains(const Point2& q1, const Point2& q2, const Scenario& s);

SlotRates rates_from_gains(const SlotGains& g, double p1, double p2);

SlotRates slot_rates(const Point2& q1, const Point2& q2, double p1, double p2, const Scenario& s);

/// Rate to an eavesdropper at a known location `we`.
double eve_rate_at(const Point2& q1, const Point2& q2, double p1, double p2, const Point2& we,
                   const Scenario& s);

/// Per-slot rates for slots 1..N (returned zero-based).
std::vector<SlotRates> evaluate_slot_rates(const Trajectory& traj, const PowerProfile& power,
                                           const Scenario& s, Exec exec = Exec::automatic);

std::vector<SlotGains> evaluate_slot_gains(const Trajectory& traj, const Scenario& s,
                                           Exec exec = Exec::automatic);

struct ObjectiveValue {
  double avg_rbar = 0.0;    // what the optimizers maximize
  double avg_rtilde = 0.0;  // clamped per slot, for reporting
};

ObjectiveValue average_rates(const std::vector<SlotRates>& rates);

ObjectiveValue objective(const Trajectory& traj, const PowerProfile& power, const Scenario& s,
                         Exec exec = Exec::automatic);

}  // namespace secjam
