#include "secjam/power_sca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace secjam {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInteriorBlend = 1e-6;

double true_average(std::span<const SlotGains> gains, const PowerProfile& p) {
  double sum = 0.0;
  for (std::size_t n = 0; n < gains.size(); ++n) sum += rbar_power_form(p.tx[n], p.jam[n], gains[n]);
  return sum / static_cast<double>(gains.size());
}

bool strictly_inside(const std::vector<double>& p, double p_ave, double p_peak) {
  double sum = 0.0;
  for (double v : p) {
    if (!(v > 0.0 && v < p_peak)) return false;
    sum += v;
  }
  return sum < p_ave * static_cast<double>(p.size());
}

std::vector<double> pull_inside(std::vector<double> p, double p_ave, double p_peak) {
  if (strictly_inside(p, p_ave, p_peak)) return p;
  double sum = 0.0;
  for (double& v : p) {
    v = std::clamp(v, 0.0, p_peak);
    sum += v;
  }
  const double budget = p_ave * static_cast<double>(p.size());
  if (sum > budget)
    for (double& v : p) v *= budget / sum;
  for (double& v : p) v = (1.0 - kInteriorBlend) * v + kInteriorBlend * 0.5 * p_ave;
  return p;
}

}  // namespace

const char* to_string(ScaStatus status) {
  switch (status) {
    case ScaStatus::converged: return "converged";
    case ScaStatus::max_iterations: return "max_iterations";
    case ScaStatus::solver_failure: return "solver_failure";
  }
  return "unknown";
}

double rbar_power_form(double p1, double p2, const SlotGains& g) {
  return std::log2(1.0 + g.g1 * p1 + g.g2 * p2) + std::log2(1.0 + g.h2 * p2) -
         std::log2(1.0 + g.g2 * p2) - std::log2(1.0 + g.h1 * p1 + g.h2 * p2);
}

double surrogate_power(double p1, double p2, const SlotGains& g, double p1_local, double p2_local) {
  const double eve_den = 1.0 + g.h1 * p1_local + g.h2 * p2_local;
  const double gn_jam_den = 1.0 + g.g2 * p2_local;
  return std::log2(1.0 + g.g1 * p1 + g.g2 * p2) + std::log2(1.0 + g.h2 * p2) -
         g.h1 * (p1 - p1_local) / (kLn2 * eve_den) - g.g2 * (p2 - p2_local) / (kLn2 * gn_jam_den) -
         g.h2 * (p2 - p2_local) / (kLn2 * eve_den) - std::log2(gn_jam_den) - std::log2(eve_den);
}

double surrogate_power(double p1, double p2, const PowerSubproblemState& state, int slot) {
  const auto k = static_cast<std::size_t>(slot);
  return surrogate_power(p1, p2, state.gains[k], state.local.tx[k], state.local.jam[k]);
}

PowerProfile interior_power(const PowerProfile& p, double p_ave, double p_peak) {
  return {pull_inside(p.tx, p_ave, p_peak), pull_inside(p.jam, p_ave, p_peak)};
}

convex::ConvexProblem build_power_problem(const PowerSubproblemState& state, double p_ave,
                                          double p_peak, const PowerProfile& start) {
  const int n_slots = static_cast<int>(state.gains.size());
  convex::ConvexProblem prob;
  prob.dimension = 2 * n_slots;
  prob.lower.assign(prob.dimension, 0.0);
  prob.upper.assign(prob.dimension, p_peak);
  prob.initial.resize(prob.dimension);

  for (int n = 0; n < n_slots; ++n) {
    const SlotGains g = state.gains[n];
    const double p1m = state.local.tx[n];
    const double p2m = state.local.jam[n];
    prob.initial[2 * n] = start.tx[n];
    prob.initial[2 * n + 1] = start.jam[n];

    convex::Term t;
    t.vars = {2 * n, 2 * n + 1};
    t.eval = [g, p1m, p2m](std::span<const double> x, std::span<double> grad, std::span<double> hess) {
      const double p1 = x[0], p2 = x[1];
      const double s1 = 1.0 + g.g1 * p1 + g.g2 * p2;
      const double s2 = 1.0 + g.h2 * p2;
      const double eve_den = 1.0 + g.h1 * p1m + g.h2 * p2m;
      const double gn_jam_den = 1.0 + g.g2 * p2m;
      grad[0] = -(g.g1 / s1 - g.h1 / eve_den) / kLn2;
      grad[1] = -(g.g2 / s1 + g.h2 / s2 - g.g2 / gn_jam_den - g.h2 / eve_den) / kLn2;
      if (!hess.empty()) {
        const double w = 1.0 / (kLn2 * s1 * s1);
        hess[0] = w * g.g1 * g.g1;
        hess[1] = hess[2] = w * g.g1 * g.g2;
        hess[3] = w * g.g2 * g.g2 + g.h2 * g.h2 / (kLn2 * s2 * s2);
      }
      return -surrogate_power(p1, p2, g, p1m, p2m);
    };
    prob.objective.push_back(std::move(t));
  }

  // Average-power budgets, one per UAV.
  for (int uav = 0; uav < 2; ++uav) {
    convex::Term t;
    t.linear = true;
    for (int n = 0; n < n_slots; ++n) t.vars.push_back(2 * n + uav);
    const double inv_n = 1.0 / n_slots;
    t.eval = [inv_n, p_ave](std::span<const double> x, std::span<double> grad, std::span<double>) {
      double sum = 0.0;
      for (std::size_t a = 0; a < x.size(); ++a) {
        sum += x[a];
        grad[a] = inv_n;
      }
      return sum * inv_n - p_ave;
    };
    prob.constraints.push_back(std::move(t));
  }
  return prob;
}

PowerResult optimize_power(std::span<const SlotGains> gains, const PowerProfile& init, double p_ave,
                           double p_peak, const ScaOptions& options) {
  const std::size_t n = gains.size();
  if (n == 0 || init.tx.size() != n || init.jam.size() != n)
    throw std::invalid_argument("optimize_power: profile length does not match the slot count");

  PowerSubproblemState state;
  state.gains.assign(gains.begin(), gains.end());
  state.local = init;

  PowerResult result;
  auto& hist = result.history;
  double current = true_average(gains, state.local);
  hist.objective.push_back(current);
  hist.status = ScaStatus::max_iterations;

  for (int m = 0; m < options.max_iterations; ++m) {
    state.iteration = m + 1;
    const PowerProfile start = interior_power(state.local, p_ave, p_peak);
    const auto problem = build_power_problem(state, p_ave, p_peak, start);
    const auto rep = convex::solve_descent_only(problem, options.solver);
    hist.solves.push_back({rep.status, rep.kkt_residual, rep.max_violation, rep.iterations});
    if (rep.status == convex::SolveStatus::numerical_failure && rep.iterations == 0) {
      hist.status = ScaStatus::solver_failure;
      hist.message = "power subproblem: " + rep.message;
      break;
    }

    PowerProfile cand;
    cand.tx.resize(n);
    cand.jam.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      cand.tx[k] = rep.x[2 * k];
      cand.jam[k] = rep.x[2 * k + 1];
    }
    const double value = true_average(gains, cand);
    if (!(value >= current)) {
      hist.status = ScaStatus::converged;  // no further ascent from this local point
      break;
    }
    const double gain = value - current;
    state.local = std::move(cand);
    current = value;
    hist.objective.push_back(current);
    state.history = hist.objective;
    if (gain <= options.rel_tol * std::max(std::abs(current), 1e-12)) {
      hist.status = ScaStatus::converged;
      break;
    }
  }

  // Zero transmission in slots that still leak more than they deliver.
  PowerProfile cleaned = state.local;
  bool changed = false;
  for (std::size_t k = 0; k < n; ++k) {
    if (cleaned.tx[k] > 0.0 && rbar_power_form(cleaned.tx[k], cleaned.jam[k], gains[k]) < 0.0) {
      cleaned.tx[k] = 0.0;
      changed = true;
    }
  }
  if (changed) {
    const double value = true_average(gains, cleaned);
    if (value >= current) {
      state.local = std::move(cleaned);
      hist.objective.push_back(value);
    }
  }

  result.power = std::move(state.local);
  return result;
}

PowerResult optimize_power(const Trajectory& traj, const PowerProfile& init, const Scenario& s,
                           const ScaOptions& options) {
  const auto gains = evaluate_slot_gains(traj, s);
  return optimize_power(gains, init, s.p_ave, s.p_peak, options);
}

}  // namespace secjam
