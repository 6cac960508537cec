#include "secjam/scenario.hpp"

#include <cmath>
#include <sstream>

namespace secjam {

namespace {

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void require(ValidationReport& r, bool cond, const char* field, const std::string& msg) {
  if (!cond) r.violations.push_back({field, msg});
}

void check_reach(ValidationReport& r, const Point2& a, const Point2& b, int n, double step,
                 const char* field) {
  const double dist = (b - a).norm();
  const double budget = (n + 1) * step;
  if (dist > budget * (1.0 + kInvariantTol)) {
    r.violations.push_back({field, "endpoint distance " + fmt(dist) + " m > (N+1)*V = " +
                                       fmt(budget) + " m"});
  }
}

}  // namespace

std::string ValidationReport::to_string() const {
  if (ok()) return "pass";
  std::string out = "fail";
  for (const auto& v : violations) out += "\n  " + v.field + ": " + v.message;
  return out;
}

ValidationReport validate(const Scenario& s) {
  ValidationReport r;
  auto finite2 = [](const Point2& p) { return std::isfinite(p.x()) && std::isfinite(p.y()); };

  require(r, s.altitude_tx > 0.0, "h1_m", "H1 must be > 0, got " + fmt(s.altitude_tx));
  require(r, s.altitude_jam > 0.0, "h2_m", "H2 must be > 0, got " + fmt(s.altitude_jam));
  require(r, s.eve_uncertainty >= 0.0, "eve_eps_m",
          "uncertainty radius must be >= 0, got " + fmt(s.eve_uncertainty));
  require(r, s.gamma0 > 0.0, "gamma0", "gamma0 must be > 0, got " + fmt(s.gamma0));
  require(r, s.p_ave > 0.0, "p_ave", "P_ave must be > 0, got " + fmt(s.p_ave));
  require(r, s.p_ave <= s.p_peak, "p_peak",
          "P_ave <= P_peak violated: " + fmt(s.p_ave) + " > " + fmt(s.p_peak));
  require(r, s.num_slots >= 1, "horizon_s", "N must be >= 1, got " + std::to_string(s.num_slots));
  require(r, s.slot_duration > 0.0, "slot_s", "t_s must be > 0, got " + fmt(s.slot_duration));
  require(r, s.speed_tx > 0.0, "v1_mps", "V1 must be > 0, got " + fmt(s.speed_tx));
  require(r, s.speed_jam > 0.0, "v2_mps", "V2 must be > 0, got " + fmt(s.speed_jam));
  require(r,
          finite2(s.gn_location) && finite2(s.est_eve_location) && finite2(s.start_tx) &&
              finite2(s.end_tx) && finite2(s.start_jam) && finite2(s.end_jam),
          "points", "all locations must be finite");

  if (r.ok()) {
    check_reach(r, s.start_tx, s.end_tx, s.num_slots, s.max_step_tx(), "start_tx/end_tx");
    check_reach(r, s.start_jam, s.end_jam, s.num_slots, s.max_step_jam(), "start_jam/end_jam");
  }
  return r;
}

ValidationReport check_trajectory(const Trajectory& traj, const Scenario& s) {
  ValidationReport r;
  const auto expected = static_cast<std::size_t>(s.num_slots + 2);
  if (traj.tx.size() != expected || traj.jam.size() != expected) {
    r.violations.push_back({"trajectory", "expected " + std::to_string(expected) + " waypoints"});
    return r;
  }
  auto check_uav = [&](const std::vector<Point2>& q, const Point2& a, const Point2& b, double step,
                       const char* name) {
    if (q.front() != a || q.back() != b)
      r.violations.push_back({name, "endpoints differ from the scenario"});
    for (std::size_t n = 0; n + 1 < q.size(); ++n) {
      const double d = (q[n + 1] - q[n]).norm();
      if (d > step * (1.0 + kInvariantTol)) {
        r.violations.push_back({name, "step " + std::to_string(n) + " moves " + fmt(d) +
                                          " m > " + fmt(step) + " m"});
        break;
      }
    }
  };
  check_uav(traj.tx, s.start_tx, s.end_tx, s.max_step_tx(), "tx");
  check_uav(traj.jam, s.start_jam, s.end_jam, s.max_step_jam(), "jam");
  return r;
}

ValidationReport check_power(const PowerProfile& power, const Scenario& s) {
  ValidationReport r;
  const auto n = static_cast<std::size_t>(s.num_slots);
  if (power.tx.size() != n || power.jam.size() != n) {
    r.violations.push_back({"power", "expected " + std::to_string(n) + " slots"});
    return r;
  }
  auto check_uav = [&](const std::vector<double>& p, const char* name) {
    double sum = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      if (p[k] < 0.0 || p[k] > s.p_peak * (1.0 + kInvariantTol)) {
        r.violations.push_back({name, "slot " + std::to_string(k + 1) + " power " + fmt(p[k]) +
                                          " outside [0, P_peak]"});
        break;
      }
      sum += p[k];
    }
    const double avg = sum / static_cast<double>(p.size());
    if (avg > s.p_ave * (1.0 + kInvariantTol))
      r.violations.push_back({name, "average power " + fmt(avg) + " > P_ave " + fmt(s.p_ave)});
  };
  check_uav(power.tx, "p_tx");
  check_uav(power.jam, "p_jam");
  return r;
}

double dbm_to_watts(double dbm) { return std::pow(10.0, (dbm - 30.0) / 10.0); }
double watts_to_dbm(double watts) { return 10.0 * std::log10(watts) + 30.0; }
double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }

Scenario default_paper_scenario(int horizon_seconds) {
  Scenario s;
  s.slot_duration = 1.0;
  s.num_slots = horizon_seconds;
  s.p_ave = dbm_to_watts(30.0);
  s.p_peak = 4.0 * s.p_ave;
  s.gamma0 = db_to_linear(80.0);
  return s;
}

}  // namespace secjam
