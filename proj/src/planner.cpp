#include "secjam/planner.hpp"

#include <cmath>
#include <sstream>

namespace secjam {

namespace {

int steps_needed(double distance, double step) {
  if (distance <= 0.0) return 0;
  return static_cast<int>(std::ceil(distance / step - 1e-9));
}

// Waypoints 0..N+1 of one UAV; throws if the hover point is out of reach.
std::vector<Point2> hover_path(const Point2& start, const Point2& hover, const Point2& end, double step,
                               int num_slots, const char* who) {
  const double d_in = (hover - start).norm();
  const double d_out = (end - hover).norm();
  const int n_in = steps_needed(d_in, step);
  const int n_out = steps_needed(d_out, step);
  if (n_in + n_out > num_slots + 1) {
    std::ostringstream msg;
    msg << who << " hover point needs " << n_in << " + " << n_out << " steps, only " << num_slots + 1
        << " available";
    throw InfeasibleHover(msg.str());
  }
  std::vector<Point2> path(num_slots + 2, hover);
  const Point2 dir_in = d_in > 0.0 ? Point2((hover - start) / d_in) : Point2::Zero();
  const Point2 dir_out = d_out > 0.0 ? Point2((end - hover) / d_out) : Point2::Zero();
  for (int k = 0; k < n_in; ++k) path[k] = start + std::min(k * step, d_in) * dir_in;
  for (int j = 0; j < n_out; ++j) path[num_slots + 1 - j] = end - std::min(j * step, d_out) * dir_out;
  path.front() = start;
  path.back() = end;
  return path;
}

void append_trace(std::vector<TraceEntry>& trace, int round, Phase phase, const ScaHistory& hist) {
  for (std::size_t k = 0; k < hist.objective.size(); ++k)
    trace.push_back({round, phase, static_cast<int>(k), hist.objective[k]});
}

void finish(Plan& plan, const Scenario& s) {
  plan.rates = evaluate_slot_rates(plan.traj, plan.power, s, Exec::serial);
  const auto avg = average_rates(plan.rates);
  plan.avg_rbar = avg.avg_rbar;
  plan.avg_rtilde = avg.avg_rtilde;
}

}  // namespace

const char* to_string(Scheme scheme) {
  switch (scheme) {
    case Scheme::proposed: return "proposed";
    case Scheme::fhf_constant: return "fhf_constant";
    case Scheme::fhf_adaptive: return "fhf_adaptive";
  }
  return "unknown";
}

std::optional<Scheme> parse_scheme(std::string_view name) {
  for (Scheme s : {Scheme::proposed, Scheme::fhf_constant, Scheme::fhf_adaptive})
    if (name == to_string(s)) return s;
  return std::nullopt;
}

const char* to_string(Phase phase) { return phase == Phase::power ? "power" : "traj"; }

Trajectory fly_hover_fly(const Scenario& s, const Point2& hover_tx, const Point2& hover_jam) {
  Trajectory t;
  t.tx = hover_path(s.start_tx, hover_tx, s.end_tx, s.max_step_tx(), s.num_slots, "transmitter");
  t.jam = hover_path(s.start_jam, hover_jam, s.end_jam, s.max_step_jam(), s.num_slots, "jammer");
  return t;
}

Trajectory default_fly_hover_fly(const Scenario& s) {
  const Trajectory line = straight_line(s);
  Trajectory t;
  try {
    t.tx = hover_path(s.start_tx, s.gn_location, s.end_tx, s.max_step_tx(), s.num_slots, "transmitter");
  } catch (const InfeasibleHover&) {
    t.tx = line.tx;
  }
  try {
    t.jam = hover_path(s.start_jam, s.est_eve_location, s.end_jam, s.max_step_jam(), s.num_slots, "jammer");
  } catch (const InfeasibleHover&) {
    t.jam = line.jam;
  }
  return t;
}

PowerProfile constant_power(const Scenario& s) {
  return {std::vector<double>(s.num_slots, s.p_ave), std::vector<double>(s.num_slots, s.p_ave)};
}

Plan optimize(const Scenario& s, const PlannerOptions& options) {
  Plan plan;
  plan.scheme = Scheme::proposed;
  plan.traj = default_fly_hover_fly(s);
  plan.power = constant_power(s);
  double current = objective(plan.traj, plan.power, s, Exec::serial).avg_rbar;

  int round = 0;
  for (round = 1; round <= options.max_rounds; ++round) {
    const double before = current;
    auto pr = optimize_power(plan.traj, plan.power, s, options.power);
    append_trace(plan.trace, round, Phase::power, pr.history);
    plan.power = std::move(pr.power);
    if (pr.history.status == ScaStatus::solver_failure) {
      plan.failed = true;
      plan.message = pr.history.message;
      break;
    }
    auto tr = optimize_trajectory(plan.power, plan.traj, s, options.traj);
    append_trace(plan.trace, round, Phase::traj, tr.history);
    plan.traj = std::move(tr.traj);
    current = objective(plan.traj, plan.power, s, Exec::serial).avg_rbar;
    plan.outer_rounds = round;
    if (tr.history.status == ScaStatus::solver_failure) {
      plan.failed = true;
      plan.message = tr.history.message;
      break;
    }
    if (current - before <= options.rel_tol * std::abs(current)) break;
  }

  // Re-allocate power on the final trajectory so no slot keeps a negative rate.
  if (!plan.failed) {
    auto pr = optimize_power(plan.traj, plan.power, s, options.power);
    append_trace(plan.trace, plan.outer_rounds + 1, Phase::power, pr.history);
    plan.power = std::move(pr.power);
    if (pr.history.status == ScaStatus::solver_failure) {
      plan.failed = true;
      plan.message = pr.history.message;
    }
  }
  finish(plan, s);
  return plan;
}

Plan baseline(const Scenario& s, Scheme scheme, const PlannerOptions& options) {
  if (scheme == Scheme::proposed) throw std::invalid_argument("baseline: proposed is not a baseline scheme");
  Plan plan;
  plan.scheme = scheme;
  plan.traj = default_fly_hover_fly(s);
  plan.power = constant_power(s);
  if (scheme == Scheme::fhf_adaptive) {
    auto pr = optimize_power(plan.traj, plan.power, s, options.power);
    append_trace(plan.trace, 1, Phase::power, pr.history);
    plan.power = std::move(pr.power);
    plan.outer_rounds = 1;
    if (pr.history.status == ScaStatus::solver_failure) {
      plan.failed = true;
      plan.message = pr.history.message;
    }
  } else {
    plan.trace.push_back({0, Phase::power, 0, objective(plan.traj, plan.power, s, Exec::serial).avg_rbar});
  }
  finish(plan, s);
  return plan;
}

Plan run_scheme(const Scenario& s, Scheme scheme, const PlannerOptions& options) {
  return scheme == Scheme::proposed ? optimize(s, options) : baseline(s, scheme, options);
}

}  // namespace secjam
