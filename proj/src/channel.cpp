#include "secjam/channel.hpp"

#include <algorithm>
#include <cmath>

namespace secjam {

double los_gain(const Point2& q, double altitude, const Point2& ground, double gamma0) {
  return gamma0 / ((q - ground).squaredNorm() + altitude * altitude);
}

double gain_to_gn(const Point2& q, double altitude, const Scenario& s) {
  return los_gain(q, altitude, s.gn_location, s.gamma0);
}

double worst_gain_to_eve_tx(const Point2& q1, const Scenario& s) {
  const double d = std::max((q1 - s.est_eve_location).norm() - s.eve_uncertainty, 0.0);
  return s.gamma0 / (d * d + s.altitude_tx * s.altitude_tx);
}

double best_gain_to_eve_jam(const Point2& q2, const Scenario& s) {
  const double d = (q2 - s.est_eve_location).norm() + s.eve_uncertainty;
  return s.gamma0 / (d * d + s.altitude_jam * s.altitude_jam);
}

namespace {

Point2 unit_from_estimate(const Point2& q, const Scenario& s) {
  const Point2 v = q - s.est_eve_location;
  const double r = v.norm();
  if (r == 0.0) return {1.0, 0.0};
  return v / r;
}

}  // namespace

Point2 attaining_eve_point_tx(const Point2& q1, const Scenario& s) {
  if ((q1 - s.est_eve_location).norm() <= s.eve_uncertainty && q1 != s.est_eve_location) return q1;
  return s.est_eve_location + s.eve_uncertainty * unit_from_estimate(q1, s);
}

Point2 attaining_eve_point_jam(const Point2& q2, const Scenario& s) {
  return s.est_eve_location - s.eve_uncertainty * unit_from_estimate(q2, s);
}

SlotGains slot_gains(const Point2& q1, const Point2& q2, const Scenario& s) {
  return {gain_to_gn(q1, s.altitude_tx, s), gain_to_gn(q2, s.altitude_jam, s),
          worst_gain_to_eve_tx(q1, s), best_gain_to_eve_jam(q2, s)};
}

SlotRates rates_from_gains(const SlotGains& g, double p1, double p2) {
  SlotRates r;
  r.r0 = std::log2(1.0 + g.g1 * p1 / (g.g2 * p2 + 1.0));
  r.re_ub = std::log2(1.0 + g.h1 * p1 / (g.h2 * p2 + 1.0));
  r.rbar = r.r0 - r.re_ub;
  r.rtilde = std::max(r.rbar, 0.0);
  return r;
}

SlotRates slot_rates(const Point2& q1, const Point2& q2, double p1, double p2, const Scenario& s) {
  return rates_from_gains(slot_gains(q1, q2, s), p1, p2);
}

double eve_rate_at(const Point2& q1, const Point2& q2, double p1, double p2, const Point2& we,
                   const Scenario& s) {
  const double h1 = los_gain(q1, s.altitude_tx, we, s.gamma0);
  const double h2 = los_gain(q2, s.altitude_jam, we, s.gamma0);
  return std::log2(1.0 + h1 * p1 / (h2 * p2 + 1.0));
}

std::vector<SlotGains> evaluate_slot_gains(const Trajectory& traj, const Scenario& s, Exec exec) {
  const auto n = static_cast<std::size_t>(traj.num_slots());
  std::vector<SlotGains> out(n);
  parallel_for(n, exec, [&](std::size_t k) { out[k] = slot_gains(traj.tx[k + 1], traj.jam[k + 1], s); });
  return out;
}

std::vector<SlotRates> evaluate_slot_rates(const Trajectory& traj, const PowerProfile& power,
                                           const Scenario& s, Exec exec) {
  const auto n = static_cast<std::size_t>(power.num_slots());
  std::vector<SlotRates> out(n);
  parallel_for(n, exec, [&](std::size_t k) {
    out[k] = slot_rates(traj.tx[k + 1], traj.jam[k + 1], power.tx[k], power.jam[k], s);
  });
  return out;
}

ObjectiveValue average_rates(const std::vector<SlotRates>& rates) {
  ObjectiveValue v;
  if (rates.empty()) return v;
  for (const auto& r : rates) {
    v.avg_rbar += r.rbar;
    v.avg_rtilde += r.rtilde;
  }
  v.avg_rbar /= static_cast<double>(rates.size());
  v.avg_rtilde /= static_cast<double>(rates.size());
  return v;
}

ObjectiveValue objective(const Trajectory& traj, const PowerProfile& power, const Scenario& s,
                         Exec exec) {
  return average_rates(evaluate_slot_rates(traj, power, s, exec));
}

}  // namespace secjam
