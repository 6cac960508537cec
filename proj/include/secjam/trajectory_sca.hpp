#pragma once

#include "secjam/channel.hpp"
#include "secjam/sca.hpp"

#include <vector>

namespace secjam {

/// Squared-distance auxiliaries of the trajectory subproblem (m^2):
/// zeta bounds |q2 - w0|^2 + H2^2, xi bounds (|q1 - we~| - eps)^2 + H1^2 and
/// tau bounds (|q2 - we~| + eps)^2 + H2^2, each from below.
struct AuxVars {
  double zeta = 0.0;
  double xi = 0.0;
  double tau = 0.0;
};

struct TrajSubproblemState {
  Trajectory local;
  PowerProfile power;
  std::vector<AuxVars> aux;  // slots 1..N, zero-based
  int iteration = 0;
  std::vector<double> history;
};

/// Smoothing length for norms that must stay differentiable at zero, m.
inline constexpr double kNormSmoothing = 1e-6;

/// Relative slack on the auxiliary floors so a start sitting exactly on a floor
/// stays strictly feasible for the barrier.
inline constexpr double kFloorRelax = 1e-6;

/// Auxiliaries at equality for the given positions (xi uses the clamped distance).
AuxVars aux_at_equality(const Point2& q1, const Point2& q2, const Scenario& s);

/// Per-slot rate with the three eavesdropper/jammer distance terms replaced by
/// the auxiliaries. Equals slot_rates().rbar when the auxiliaries are at equality.
double rhat(const Point2& q1, const Point2& q2, const AuxVars& aux, double p1, double p2,
            const Scenario& s);

/// Residuals (<= 0 means satisfied) of the three linearized distance constraints
/// built at the local point. `xi_cap` is only active when the local transmitter
/// position lies inside the uncertainty disk; otherwise it is -inf.
struct LinearizedResiduals {
  double zeta = 0.0;
  double xi = 0.0;
  double tau = 0.0;
  double xi_cap = 0.0;
};

LinearizedResiduals linearized_constraints(const Point2& q1, const Point2& q2, const AuxVars& aux,
                                           const Point2& q1_local, const Point2& q2_local,
                                           const Scenario& s);

/// Lower bound on rhat(): the two convex-in-position log terms are replaced by
/// their tangents (in squared distance) at the local positions.
double surrogate_rhat(const Point2& q1, const Point2& q2, const AuxVars& aux, const Point2& q1_local,
                      const Point2& q2_local, double p1, double p2, const Scenario& s);

/// Variables per slot: q1x, q1y, q2x, q2y, zeta, xi, tau (7N total).
inline constexpr int kTrajVarsPerSlot = 7;

convex::ConvexProblem build_trajectory_problem(const TrajSubproblemState& state, const Scenario& s,
                                               const Trajectory& start, const std::vector<AuxVars>& start_aux);

/// True when every per-slot displacement is strictly below its limit.
bool strictly_within_speed(const Trajectory& traj, const Scenario& s);

/// Constant-speed straight flight from start to end.
Trajectory straight_line(const Scenario& s);

struct TrajectoryResult {
  Trajectory traj;
  ScaHistory history;
  std::vector<AuxVars> last_aux;  // auxiliaries returned by the last accepted solve
};

TrajectoryResult optimize_trajectory(const PowerProfile& power, const Trajectory& init,
                                     const Scenario& s, const ScaOptions& options = {});

}  // namespace secjam
