#include "secjam/trajectory_sca.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace secjam {

namespace {

constexpr double kLn2 = std::numbers::ln2;
constexpr double kInteriorBlend = 1e-7;
constexpr double kAuxBackoff = 1e-8;

double smoothed_norm(const Point2& v) { return std::sqrt(v.squaredNorm() + kNormSmoothing * kNormSmoothing); }

// Everything the slot surrogate needs from the local point.
struct Expansion {
  Point2 q1m, q2m;
  Point2 x1m, x2m;  // offsets from the eavesdropper estimate
  double u1m = 0.0, u2m = 0.0;
  double r1m = 0.0, r2m = 0.0;
  Point2 dir2{1.0, 0.0};
  double s_m = 0.0;
  double a = 0.0, b = 0.0, c = 0.0, d = 0.0;
  double k1 = 0.0, k2 = 0.0;
  bool cap = false;
};

Expansion expand(const Point2& q1m, const Point2& q2m, double p1, double p2, const Scenario& s) {
  Expansion e;
  const double eps = s.eve_uncertainty;
  const double g0 = s.gamma0;
  e.q1m = q1m;
  e.q2m = q2m;
  e.x1m = q1m - s.est_eve_location;
  e.x2m = q2m - s.est_eve_location;
  e.u1m = (q1m - s.gn_location).squaredNorm();
  e.u2m = (q2m - s.gn_location).squaredNorm();
  e.r1m = e.x1m.norm();
  e.r2m = e.x2m.norm();
  if (e.r2m > 0.0) e.dir2 = e.x2m / e.r2m;
  e.s_m = (e.r2m + eps) * (e.r2m + eps);
  e.k1 = g0 * p1;
  e.k2 = g0 * p2;

  const double g1 = g0 / (e.u1m + s.altitude_tx * s.altitude_tx);
  const double g2 = g0 / (e.u2m + s.altitude_jam * s.altitude_jam);
  const double h2 = g0 / (e.s_m + s.altitude_jam * s.altitude_jam);
  const double gn_den = 1.0 + g1 * p1 + g2 * p2;
  e.a = -g2 * g2 * p2 / (kLn2 * g0 * gn_den);
  e.b = -g1 * g1 * p1 / (kLn2 * g0 * gn_den);
  e.c = -h2 * h2 * p2 / (kLn2 * g0 * (1.0 + h2 * p2));
  e.d = std::log2(1.0 + h2 * p2) + std::log2(gn_den);
  e.cap = eps > 0.0 && e.r1m <= eps;
  return e;
}

double zeta_bound(const Expansion& e, const Point2& q2, const Scenario& s) {
  return e.u2m + 2.0 * (e.q2m - s.gn_location).dot(q2 - e.q2m) + s.altitude_jam * s.altitude_jam;
}

double xi_bound(const Expansion& e, const Point2& q1, const Scenario& s) {
  const double eps = s.eve_uncertainty;
  return e.r1m * e.r1m + 2.0 * e.x1m.dot(q1 - e.q1m) - 2.0 * eps * smoothed_norm(q1 - s.est_eve_location) +
         eps * eps + s.altitude_tx * s.altitude_tx;
}

double tau_bound(const Expansion& e, const Point2& q2, const Scenario& s) {
  const double eps = s.eve_uncertainty;
  return eps * eps + s.altitude_jam * s.altitude_jam + e.r2m * e.r2m +
         2.0 * (e.x2m + eps * e.dir2).dot(q2 - e.q2m) + 2.0 * eps * e.r2m;
}

double surrogate_value(const Expansion& e, const Point2& q1, const Point2& q2, const AuxVars& aux,
                       const Scenario& s) {
  const double eps = s.eve_uncertainty;
  const double rs = smoothed_norm(q2 - s.est_eve_location) + eps;
  return -std::log2(1.0 + e.k2 / aux.zeta) - std::log2(1.0 + e.k1 / aux.xi + e.k2 / aux.tau) +
         e.a * ((q2 - s.gn_location).squaredNorm() - e.u2m) +
         e.b * ((q1 - s.gn_location).squaredNorm() - e.u1m) + e.c * (rs * rs - e.s_m) + e.d;
}

struct Floors {
  double zeta, xi, tau;
};

Floors aux_floors(const Scenario& s) {
  const double h1 = s.altitude_tx * s.altitude_tx;
  const double h2 = s.altitude_jam * s.altitude_jam;
  const double eps2 = s.eve_uncertainty * s.eve_uncertainty;
  return {h2 * (1.0 - kFloorRelax), h1 * (1.0 - kFloorRelax), (h2 + eps2) * (1.0 - kFloorRelax)};
}

Trajectory blend(const Trajectory& a, const Trajectory& b, double theta) {
  Trajectory out = a;
  for (std::size_t k = 1; k + 1 < a.tx.size(); ++k) {
    out.tx[k] = (1.0 - theta) * a.tx[k] + theta * b.tx[k];
    out.jam[k] = (1.0 - theta) * a.jam[k] + theta * b.jam[k];
  }
  return out;
}

bool has_strict_interior(const Scenario& s) {
  const double budget = s.num_slots + 1.0;
  return (s.end_tx - s.start_tx).norm() < budget * s.max_step_tx() * (1.0 - 1e-12) &&
         (s.end_jam - s.start_jam).norm() < budget * s.max_step_jam() * (1.0 - 1e-12);
}

// Adds |b - a|^2 - V^2 <= 0 for one transition; fixed endpoints are baked in.
void add_speed_constraint(convex::ConvexProblem& prob, int var_a, const Point2& fixed_a, int var_b,
                          const Point2& fixed_b, double step) {
  convex::Term t;
  const double v2 = step * step;
  if (var_a >= 0 && var_b >= 0) {
    t.vars = {var_a, var_a + 1, var_b, var_b + 1};
    t.eval = [v2](std::span<const double> x, std::span<double> grad, std::span<double> hess) {
      const double dx = x[2] - x[0], dy = x[3] - x[1];
      grad[0] = -2.0 * dx;
      grad[1] = -2.0 * dy;
      grad[2] = 2.0 * dx;
      grad[3] = 2.0 * dy;
      if (!hess.empty()) {
        std::fill(hess.begin(), hess.end(), 0.0);
        for (int i = 0; i < 2; ++i) {
          hess[i * 4 + i] = 2.0;
          hess[(i + 2) * 4 + (i + 2)] = 2.0;
          hess[i * 4 + (i + 2)] = -2.0;
          hess[(i + 2) * 4 + i] = -2.0;
        }
      }
      return dx * dx + dy * dy - v2;
    };
  } else {
    const int var = var_a >= 0 ? var_a : var_b;
    const Point2 anchor = var_a >= 0 ? fixed_b : fixed_a;
    t.vars = {var, var + 1};
    t.eval = [v2, anchor](std::span<const double> x, std::span<double> grad, std::span<double> hess) {
      const double dx = x[0] - anchor.x(), dy = x[1] - anchor.y();
      grad[0] = 2.0 * dx;
      grad[1] = 2.0 * dy;
      if (!hess.empty()) {
        hess[0] = hess[3] = 2.0;
        hess[1] = hess[2] = 0.0;
      }
      return dx * dx + dy * dy - v2;
    };
  }
  prob.constraints.push_back(std::move(t));
}

}  // namespace

AuxVars aux_at_equality(const Point2& q1, const Point2& q2, const Scenario& s) {
  const double eps = s.eve_uncertainty;
  const double d1 = std::max((q1 - s.est_eve_location).norm() - eps, 0.0);
  const double d2 = (q2 - s.est_eve_location).norm() + eps;
  return {(q2 - s.gn_location).squaredNorm() + s.altitude_jam * s.altitude_jam,
          d1 * d1 + s.altitude_tx * s.altitude_tx, d2 * d2 + s.altitude_jam * s.altitude_jam};
}

double rhat(const Point2& q1, const Point2& q2, const AuxVars& aux, double p1, double p2,
            const Scenario& s) {
  const double k1 = s.gamma0 * p1, k2 = s.gamma0 * p2;
  const double g1 = gain_to_gn(q1, s.altitude_tx, s);
  const double g2 = gain_to_gn(q2, s.altitude_jam, s);
  const double h2 = best_gain_to_eve_jam(q2, s);
  return -std::log2(1.0 + k2 / aux.zeta) - std::log2(1.0 + k1 / aux.xi + k2 / aux.tau) +
         std::log2(1.0 + h2 * p2) + std::log2(1.0 + g1 * p1 + g2 * p2);
}

LinearizedResiduals linearized_constraints(const Point2& q1, const Point2& q2, const AuxVars& aux,
                                           const Point2& q1_local, const Point2& q2_local,
                                           const Scenario& s) {
  const Expansion e = expand(q1_local, q2_local, 0.0, 0.0, s);
  LinearizedResiduals r;
  r.zeta = aux.zeta - zeta_bound(e, q2, s);
  r.xi = aux.xi - xi_bound(e, q1, s);
  r.tau = aux.tau - tau_bound(e, q2, s);
  r.xi_cap = e.cap ? aux.xi - s.altitude_tx * s.altitude_tx : -INFINITY;
  return r;
}

double surrogate_rhat(const Point2& q1, const Point2& q2, const AuxVars& aux, const Point2& q1_local,
                      const Point2& q2_local, double p1, double p2, const Scenario& s) {
  return surrogate_value(expand(q1_local, q2_local, p1, p2, s), q1, q2, aux, s);
}

bool strictly_within_speed(const Trajectory& traj, const Scenario& s) {
  auto ok = [](const std::vector<Point2>& q, double step) {
    for (std::size_t n = 0; n + 1 < q.size(); ++n)
      if (!((q[n + 1] - q[n]).squaredNorm() < step * step)) return false;
    return true;
  };
  return ok(traj.tx, s.max_step_tx()) && ok(traj.jam, s.max_step_jam());
}

Trajectory straight_line(const Scenario& s) {
  Trajectory t;
  const int n = s.num_slots;
  t.tx.resize(n + 2);
  t.jam.resize(n + 2);
  for (int k = 0; k <= n + 1; ++k) {
    const double f = static_cast<double>(k) / (n + 1);
    t.tx[k] = s.start_tx + f * (s.end_tx - s.start_tx);
    t.jam[k] = s.start_jam + f * (s.end_jam - s.start_jam);
  }
  t.tx.front() = s.start_tx;
  t.tx.back() = s.end_tx;
  t.jam.front() = s.start_jam;
  t.jam.back() = s.end_jam;
  return t;
}

convex::ConvexProblem build_trajectory_problem(const TrajSubproblemState& state, const Scenario& s,
                                               const Trajectory& start, const std::vector<AuxVars>& start_aux) {
  const int n_slots = s.num_slots;
  const double eps = s.eve_uncertainty;
  const Point2 w0 = s.gn_location;
  const Point2 we = s.est_eve_location;
  const Floors floors = aux_floors(s);

  convex::ConvexProblem prob;
  prob.dimension = kTrajVarsPerSlot * n_slots;
  prob.lower.assign(prob.dimension, -INFINITY);
  prob.initial.resize(prob.dimension);

  for (int n = 0; n < n_slots; ++n) {
    const int base = kTrajVarsPerSlot * n;
    const Expansion e = expand(state.local.tx[n + 1], state.local.jam[n + 1], state.power.tx[n],
                               state.power.jam[n], s);
    const Point2& q1 = start.tx[n + 1];
    const Point2& q2 = start.jam[n + 1];
    const AuxVars& aux = start_aux[n];
    const double init[kTrajVarsPerSlot] = {q1.x(), q1.y(), q2.x(), q2.y(), aux.zeta, aux.xi, aux.tau};
    std::copy(std::begin(init), std::end(init), prob.initial.begin() + base);
    prob.lower[base + 4] = floors.zeta;
    prob.lower[base + 5] = floors.xi;
    prob.lower[base + 6] = floors.tau;

    convex::Term obj;
    for (int v = 0; v < kTrajVarsPerSlot; ++v) obj.vars.push_back(base + v);
    obj.eval = [e, eps, w0, we](std::span<const double> x, std::span<double> grad, std::span<double> hess) {
      const double zeta = x[4], xi = x[5], tau = x[6];
      const Point2 d1(x[0] - w0.x(), x[1] - w0.y());
      const Point2 d2(x[2] - w0.x(), x[3] - w0.y());
      const Point2 v(x[2] - we.x(), x[3] - we.y());
      const double r = smoothed_norm(v);
      const double rs = r + eps;
      const double k1 = e.k1, k2 = e.k2;
      const double s_eve = 1.0 + k1 / xi + k2 / tau;

      const double value = std::log2(1.0 + k2 / zeta) + std::log2(s_eve) -
                           e.a * (d2.squaredNorm() - e.u2m) - e.b * (d1.squaredNorm() - e.u1m) -
                           e.c * (rs * rs - e.s_m) - e.d;

      // -c * (r + eps)^2 with r the smoothed distance to the estimate
      const Point2 dr = v / r;
      grad[0] = -2.0 * e.b * d1.x();
      grad[1] = -2.0 * e.b * d1.y();
      grad[2] = -2.0 * e.a * d2.x() - 2.0 * e.c * rs * dr.x();
      grad[3] = -2.0 * e.a * d2.y() - 2.0 * e.c * rs * dr.y();
      grad[4] = -k2 / (zeta * (zeta + k2) * kLn2);
      grad[5] = -k1 / (xi * xi * s_eve * kLn2);
      grad[6] = -k2 / (tau * tau * s_eve * kLn2);

      if (!hess.empty()) {
        constexpr int K = kTrajVarsPerSlot;
        std::fill(hess.begin(), hess.end(), 0.0);
        hess[0 * K + 0] = hess[1 * K + 1] = -2.0 * e.b;
        // q2 block: -2a I - c * (2 dr dr^T + 2 (r+eps)(I - dr dr^T) / r)
        for (int i = 0; i < 2; ++i) {
          for (int j = 0; j < 2; ++j) {
            const double id = i == j ? 1.0 : 0.0;
            const double outer = dr[i] * dr[j];
            hess[(2 + i) * K + (2 + j)] =
                -2.0 * e.a * id - e.c * (2.0 * outer + 2.0 * rs * (id - outer) / r);
          }
        }
        hess[4 * K + 4] = k2 * (2.0 * zeta + k2) / (zeta * zeta * (zeta + k2) * (zeta + k2) * kLn2);
        const double ds_xi = -k1 / (xi * xi), ds_tau = -k2 / (tau * tau);
        const double dds_xi = 2.0 * k1 / (xi * xi * xi), dds_tau = 2.0 * k2 / (tau * tau * tau);
        hess[5 * K + 5] = (dds_xi / s_eve - ds_xi * ds_xi / (s_eve * s_eve)) / kLn2;
        hess[6 * K + 6] = (dds_tau / s_eve - ds_tau * ds_tau / (s_eve * s_eve)) / kLn2;
        hess[5 * K + 6] = hess[6 * K + 5] = -ds_xi * ds_tau / (s_eve * s_eve * kLn2);
      }
      return value;
    };
    prob.objective.push_back(std::move(obj));

    const double h1sq = s.altitude_tx * s.altitude_tx;
    const double h2sq = s.altitude_jam * s.altitude_jam;

    convex::Term ca;  // zeta below the tangent of |q2 - w0|^2 + H2^2
    ca.linear = true;
    ca.vars = {base + 2, base + 3, base + 4};
    ca.eval = [e, w0, h2sq](std::span<const double> x, std::span<double> grad, std::span<double>) {
      const Point2 gq = 2.0 * (e.q2m - w0);
      grad[0] = -gq.x();
      grad[1] = -gq.y();
      grad[2] = 1.0;
      return x[2] - e.u2m - gq.dot(Point2(x[0], x[1]) - e.q2m) - h2sq;
    };
    prob.constraints.push_back(std::move(ca));

    convex::Term cb;  // xi below the tangent of |x|^2 minus the exact 2 eps |x|
    cb.vars = {base, base + 1, base + 5};
    cb.eval = [e, eps, we, h1sq](std::span<const double> x, std::span<double> grad, std::span<double> hess) {
      const Point2 q(x[0], x[1]);
      const Point2 v = q - we;
      const double r = smoothed_norm(v);
      grad[0] = -2.0 * e.x1m.x() + 2.0 * eps * v.x() / r;
      grad[1] = -2.0 * e.x1m.y() + 2.0 * eps * v.y() / r;
      grad[2] = 1.0;
      if (!hess.empty()) {
        std::fill(hess.begin(), hess.end(), 0.0);
        const double w = 2.0 * eps / r;
        hess[0] = w * (1.0 - v.x() * v.x() / (r * r));
        hess[4] = w * (1.0 - v.y() * v.y() / (r * r));
        hess[1] = hess[3] = -w * v.x() * v.y() / (r * r);
      }
      return x[2] - e.r1m * e.r1m - 2.0 * e.x1m.dot(q - e.q1m) + 2.0 * eps * r - eps * eps - h1sq;
    };
    prob.constraints.push_back(std::move(cb));

    convex::Term cc;  // tau below the tangent of (|x| + eps)^2 + H2^2
    cc.linear = true;
    cc.vars = {base + 2, base + 3, base + 6};
    cc.eval = [e, eps, h2sq](std::span<const double> x, std::span<double> grad, std::span<double>) {
      const Point2 gq = 2.0 * (e.x2m + eps * e.dir2);
      grad[0] = -gq.x();
      grad[1] = -gq.y();
      grad[2] = 1.0;
      return x[2] - eps * eps - h2sq - e.r2m * e.r2m - gq.dot(Point2(x[0], x[1]) - e.q2m) -
             2.0 * eps * e.r2m;
    };
    prob.constraints.push_back(std::move(cc));

    if (e.cap) {
      // Local transmitter inside the disk: the clamped distance is zero to first order.
      convex::Term cap;
      cap.linear = true;
      cap.vars = {base + 5};
      cap.eval = [h1sq](std::span<const double> x, std::span<double> grad, std::span<double>) {
        grad[0] = 1.0;
        return x[0] - h1sq;
      };
      prob.constraints.push_back(std::move(cap));
    }
  }

  for (int n = 0; n <= n_slots; ++n) {
    const int va = n == 0 ? -1 : kTrajVarsPerSlot * (n - 1);
    const int vb = n == n_slots ? -1 : kTrajVarsPerSlot * n;
    add_speed_constraint(prob, va, s.start_tx, vb, s.end_tx, s.max_step_tx());
    add_speed_constraint(prob, va < 0 ? -1 : va + 2, s.start_jam, vb < 0 ? -1 : vb + 2, s.end_jam,
                         s.max_step_jam());
  }
  return prob;
}

TrajectoryResult optimize_trajectory(const PowerProfile& power, const Trajectory& init,
                                     const Scenario& s, const ScaOptions& options) {
  const int n_slots = s.num_slots;
  if (init.num_slots() != n_slots || power.num_slots() != n_slots)
    throw std::invalid_argument("optimize_trajectory: slot count mismatch");

  TrajectoryResult result;
  auto& hist = result.history;
  TrajSubproblemState state;
  state.local = init;
  state.power = power;
  double current = objective(init, power, s).avg_rbar;
  hist.objective.push_back(current);

  if (!has_strict_interior(s)) {
    result.traj = init;
    hist.status = ScaStatus::converged;
    hist.message = "no slack in the speed constraints; trajectory is fixed";
    return result;
  }

  const Floors floors = aux_floors(s);
  const Trajectory line = straight_line(s);
  hist.status = ScaStatus::max_iterations;

  for (int m = 0; m < options.max_iterations; ++m) {
    state.iteration = m + 1;
    const Trajectory start =
        strictly_within_speed(state.local, s) ? state.local : blend(state.local, line, kInteriorBlend);

    // Auxiliaries just below their linearized upper bounds at the start point.
    std::vector<AuxVars> aux(n_slots);
    bool aux_ok = true;
    for (int n = 0; n < n_slots && aux_ok; ++n) {
      const Expansion e = expand(state.local.tx[n + 1], state.local.jam[n + 1], 0.0, 0.0, s);
      double hi_zeta = zeta_bound(e, start.jam[n + 1], s);
      double hi_xi = xi_bound(e, start.tx[n + 1], s);
      if (e.cap) hi_xi = std::min(hi_xi, s.altitude_tx * s.altitude_tx);
      double hi_tau = tau_bound(e, start.jam[n + 1], s);
      auto inside = [](double lo, double hi) { return lo + (hi - lo) * (1.0 - kAuxBackoff); };
      aux_ok = hi_zeta > floors.zeta && hi_xi > floors.xi && hi_tau > floors.tau;
      aux[n] = {inside(floors.zeta, hi_zeta), inside(floors.xi, hi_xi), inside(floors.tau, hi_tau)};
    }
    if (!aux_ok) {
      hist.status = ScaStatus::solver_failure;
      hist.message = "trajectory subproblem: could not build a strictly feasible start";
      break;
    }
    state.aux = aux;

    const auto problem = build_trajectory_problem(state, s, start, aux);
    const auto rep = convex::solve_descent_only(problem, options.solver);
    hist.solves.push_back({rep.status, rep.kkt_residual, rep.max_violation, rep.iterations});
    if (rep.status == convex::SolveStatus::numerical_failure && rep.iterations == 0) {
      hist.status = ScaStatus::solver_failure;
      hist.message = "trajectory subproblem: " + rep.message;
      break;
    }

    Trajectory cand = state.local;
    std::vector<AuxVars> cand_aux(n_slots);
    for (int n = 0; n < n_slots; ++n) {
      const int base = kTrajVarsPerSlot * n;
      cand.tx[n + 1] = Point2(rep.x[base], rep.x[base + 1]);
      cand.jam[n + 1] = Point2(rep.x[base + 2], rep.x[base + 3]);
      cand_aux[n] = {rep.x[base + 4], rep.x[base + 5], rep.x[base + 6]};
    }
    const double value = objective(cand, power, s).avg_rbar;
    if (!(value >= current)) {
      hist.status = ScaStatus::converged;
      break;
    }
    const double gain = value - current;
    state.local = std::move(cand);
    result.last_aux = std::move(cand_aux);
    current = value;
    hist.objective.push_back(current);
    state.history = hist.objective;
    if (gain <= options.rel_tol * std::max(std::abs(current), 1e-12)) {
      hist.status = ScaStatus::converged;
      break;
    }
  }

  result.traj = std::move(state.local);
  return result;
}

}  // namespace secjam
